"""Token-level GED scoring: per-class and macro-averaged P/R/F-beta plus accuracy."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..corpus import GedRecord


@dataclass(frozen=True)
class ClassScore:
    label: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f: float


@dataclass(frozen=True)
class GedScore:
    per_class: tuple[ClassScore, ...]
    precision: float
    recall: float
    f: float
    accuracy: float
    tokens: int
    beta: float = 0.5

    def by_label(self) -> dict[str, ClassScore]:
        return {c.label: c for c in self.per_class}


def _prf(tp: int, fp: int, fn: int, beta: float) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    b2 = beta * beta
    f = (1 + b2) * p * r / (b2 * p + r) if p + r else 0.0
    return p, r, f


def ged_score(gold: Sequence[GedRecord], predicted: Sequence[GedRecord], beta: float = 0.5) -> GedScore:
    """Classes are those present in gold or predictions; macro values are
    unweighted means of the per-class values. A class never predicted has
    precision 0, one never in gold has recall 0."""
    if len(gold) != len(predicted):
        raise ValueError(f"sentence count mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    correct = total = 0
    for idx, (g, p) in enumerate(zip(gold, predicted), start=1):
        if len(g.labels) != len(p.labels):
            raise ValueError(
                f"sentence {idx}: {len(g.labels)} gold labels vs {len(p.labels)} predicted"
            )
        for gl, pl in zip(g.labels, p.labels):
            total += 1
            if gl == pl:
                tp[gl] += 1
                correct += 1
            else:
                fp[pl] += 1
                fn[gl] += 1
    labels = sorted(set(tp) | set(fp) | set(fn))
    per_class = tuple(ClassScore(lab, tp[lab], fp[lab], fn[lab], *_prf(tp[lab], fp[lab], fn[lab], beta)) for lab in labels)
    if per_class:
        n = len(per_class)
        macro = (
            sum(c.precision for c in per_class) / n,
            sum(c.recall for c in per_class) / n,
            sum(c.f for c in per_class) / n,
        )
    else:
        macro = (1.0, 1.0, 1.0)
    accuracy = correct / total if total else 1.0
    return GedScore(per_class, *macro, accuracy, total, beta)
