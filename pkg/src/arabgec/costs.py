"""Character cost tables for weighted Levenshtein distance."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

# hamzated Alif vs bare Alif, final Ya vs Alif Maqsura, Ta Marbuta vs Ha
CONFUSION_PAIRS = (
    ("أ", "ا"),  # أ ا
    ("إ", "ا"),  # إ ا
    ("ي", "ى"),  # ي ى
    ("ة", "ه"),  # ة ه
)

# fathatan .. sukun
DIACRITICS = frozenset(chr(c) for c in range(0x064B, 0x0653))


@dataclass(frozen=True)
class CostMatrix:
    substitution: float = 1.0
    indel: float = 1.0
    confusion: float = 0.25
    diacritic: float = 0.25
    token_indel_extra: float = 0.1
    pairs: frozenset = field(default=frozenset(frozenset(p) for p in CONFUSION_PAIRS))
    light_chars: frozenset = DIACRITICS

    def __post_init__(self):
        for name in ("substitution", "indel", "confusion", "diacritic", "token_indel_extra"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} cost must be non-negative")

    @classmethod
    def unit(cls) -> CostMatrix:
        return cls(confusion=1.0, diacritic=1.0, token_indel_extra=0.0)

    def sub(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        if frozenset((a, b)) in self.pairs:
            return self.confusion
        if a in self.light_chars and b in self.light_chars:
            return self.diacritic
        return self.substitution

    def ins(self, ch: str) -> float:
        return self.diacritic if ch in self.light_chars else self.indel

    def string_indel(self, text: str) -> float:
        return sum(self.ins(ch) for ch in text)

    def token_indel(self, text: str) -> float:
        """Cost of inserting or deleting a whole token."""
        return self.string_indel(text) + self.token_indel_extra


def token_distance(a: str, b: str, costs: CostMatrix) -> float:
    return _distance(a, b, costs)


@lru_cache(maxsize=200_000)
def _distance(a: str, b: str, costs: CostMatrix) -> float:
    if a == b:
        return 0.0
    if len(a) < len(b):
        a, b = b, a
    prev = [0.0]
    for ch in b:
        prev.append(prev[-1] + costs.ins(ch))
    for ca in a:
        cur = [prev[0] + costs.ins(ca)]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j - 1] + costs.sub(ca, cb), prev[j] + costs.ins(ca), cur[j - 1] + costs.ins(cb)))
        prev = cur
    return prev[-1]
