"""Key-value configuration files.

One ``key = value`` per line; ``#`` starts a comment. Command-line flags take
precedence over values read from a file.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .costs import CostMatrix


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    sub_cost: float = 1.0
    indel_cost: float = 1.0
    confusion_cost: float = 0.25
    diacritic_cost: float = 0.25
    token_indel_extra: float = 0.1
    threshold: int = 100
    timeout: float = 30.0
    granularity: int = 43
    max_unchanged: int = 2
    beta: float = 0.5
    jobs: int = 1
    src: str = ""
    tgt: str = ""
    gold: str = ""
    hyp: str = ""
    out: str = ""
    model: str = ""

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type in ("float", "int") and value < 0:
                raise ConfigError(f"{f.name} must be non-negative, got {value}")
        if self.granularity not in (43, 13, 2):
            raise ConfigError(f"granularity must be 43, 13 or 2, got {self.granularity}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def costs(self) -> CostMatrix:
        return CostMatrix(
            substitution=self.sub_cost,
            indel=self.indel_cost,
            confusion=self.confusion_cost,
            diacritic=self.diacritic_cost,
            token_indel_extra=self.token_indel_extra,
        )

    def updated(self, **overrides) -> Config:
        """Apply overrides whose value is not None."""
        return _coerce(self, {k: v for k, v in overrides.items() if v is not None})


_CASTS = {"float": float, "int": int, "str": str}


def _coerce(base: Config, values: dict) -> Config:
    types = {f.name: f.type for f in fields(Config)}
    clean = {}
    for key, value in values.items():
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            clean[key] = _CASTS[types[key]](value)
        except ValueError:
            raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return replace(base, **clean)


def parse_config(text: str) -> Config:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        values[key.strip()] = value.strip()
    return _coerce(Config(), values)


def load_config(path) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
