"""MaxMatch (M2) scoring of system hypotheses against gold M2 annotations.

For every sentence an edit lattice is built from all minimal token-level
Levenshtein paths between source and hypothesis. The lattice is closed
transitively so that adjacent edits (with at most ``max_unchanged`` unchanged
words in between) can also be taken as one edit. The path through the
lattice with the most gold matches is selected; among those, the path with
the fewest and shortest non-gold edits wins.

Evaluation of one sentence may be given a wall-clock budget. A sentence that
exceeds it is scored as if the system had left the source unchanged.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..corpus import M2Record
from ..parallel import ordered_map

DEFAULT_MAX_UNCHANGED = 2
DEFAULT_TIMEOUT = 30.0

Vertex = tuple[int, int]


class SentenceTimeout(Exception):
    pass


class Deadline:
    def __init__(self, seconds: float | None):
        self.end = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.end is not None and time.monotonic() >= self.end:
            raise SentenceTimeout


@dataclass(frozen=True)
class LatticeEdit:
    start: int
    end: int
    hyp_start: int
    hyp_end: int
    original: str
    correction: str
    dist: int
    unchanged: int
    noop: bool


@dataclass(frozen=True)
class GoldEdit:
    start: int
    end: int
    corrections: tuple[str, ...]


@dataclass
class Lattice:
    source: tuple[str, ...]
    hyp: tuple[str, ...]
    edges: dict[tuple[Vertex, Vertex], LatticeEdit] = field(default_factory=dict)

    @property
    def start(self) -> Vertex:
        return (0, 0)

    @property
    def goal(self) -> Vertex:
        return (len(self.source), len(self.hyp))

    def out_edges(self) -> dict[Vertex, list[tuple[Vertex, LatticeEdit]]]:
        out: dict[Vertex, list] = {}
        for (u, v), e in sorted(self.edges.items()):
            out.setdefault(u, []).append((v, e))
        return out


def _levenshtein_moves(a: Sequence[str], b: Sequence[str]) -> dict[Vertex, list[Vertex]]:
    """Predecessors of each cell on some minimal edit path, restricted to
    cells reachable backwards from the final cell."""
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(d[i - 1][j - 1] + (a[i - 1] != b[j - 1]), d[i - 1][j] + 1, d[i][j - 1] + 1)
    preds: dict[Vertex, list[Vertex]] = {}
    stack = [(n, m)]
    while stack:
        v = stack.pop()
        if v in preds:
            continue
        i, j = v
        ps = []
        if i > 0 and j > 0 and d[i - 1][j - 1] + (a[i - 1] != b[j - 1]) == d[i][j]:
            ps.append((i - 1, j - 1))
        if i > 0 and d[i - 1][j] + 1 == d[i][j]:
            ps.append((i - 1, j))
        if j > 0 and d[i][j - 1] + 1 == d[i][j]:
            ps.append((i, j - 1))
        preds[v] = ps
        stack.extend(ps)
    return preds


def build_lattice(
    source: Sequence[str],
    hyp: Sequence[str],
    max_unchanged: int = DEFAULT_MAX_UNCHANGED,
    deadline: Deadline | None = None,
) -> Lattice:
    deadline = deadline or Deadline(None)
    deadline.check()
    source, hyp = tuple(source), tuple(hyp)
    lat = Lattice(source, hyp)

    def make(u: Vertex, v: Vertex, dist: int, unchanged: int, noop: bool) -> LatticeEdit:
        return LatticeEdit(
            u[0], v[0], u[1], v[1],
            " ".join(source[u[0]:v[0]]), " ".join(hyp[u[1]:v[1]]),
            dist, unchanged, noop,
        )

    succ: dict[Vertex, list[tuple[Vertex, bool]]] = {}
    for v, ps in _levenshtein_moves(source, hyp).items():
        for u in ps:
            noop = v[0] - u[0] == 1 and v[1] - u[1] == 1 and source[u[0]] == hyp[u[1]]
            succ.setdefault(u, []).append((v, noop))
            lat.edges[(u, v)] = make(u, v, 1, int(noop), noop)
    for u in succ:
        succ[u].sort()

    # transitive closure: composite edits through at most max_unchanged noops
    for u in sorted(succ):
        deadline.check()
        # (vertex, unchanged, has_edit) -> minimal primitive count
        best: dict[tuple[Vertex, int, bool], int] = {}
        heap: list[tuple[Vertex, int, bool]] = []
        for v, noop in succ[u]:
            key = (v, int(noop), not noop)
            best[key] = 1
            heapq.heappush(heap, key)
        seen = set()
        while heap:
            deadline.check()
            key = heapq.heappop(heap)
            if key in seen:
                continue
            seen.add(key)
            v, unch, has_edit = key
            dist = best[key]
            if dist >= 2 and has_edit:
                cur = lat.edges.get((u, v))
                if cur is None or (not cur.noop and dist < cur.dist):
                    lat.edges[(u, v)] = make(u, v, dist, unch, False)
            for w, noop in succ.get(v, ()):
                nunch = unch + int(noop)
                if nunch > max_unchanged:
                    continue
                nkey = (w, nunch, has_edit or not noop)
                if dist + 1 < best.get(nkey, 1 << 30):
                    best[nkey] = dist + 1
                    heapq.heappush(heap, nkey)
    return lat


def gold_edits_of(record: M2Record, annotator: int, lower: bool = True) -> list[GoldEdit]:
    out = []
    for e in record.edits_for(annotator):
        corrections = tuple(c.lower() if lower else c for c in e.correction.split("||"))
        out.append(GoldEdit(e.start, e.end, corrections))
    return out


def matches(edit: LatticeEdit, gold: GoldEdit) -> bool:
    return edit.start == gold.start and edit.end == gold.end and edit.correction in gold.corrections


def _next_match(edit: LatticeEdit, gold: Sequence[GoldEdit], last: int) -> int | None:
    for i in range(last, len(gold)):
        if matches(edit, gold[i]):
            return i
    return None


def count_matches(edits: Sequence[LatticeEdit], gold: Sequence[GoldEdit]) -> int:
    """Match path edits to gold edits in order, each gold edit used at most once."""
    n = 0
    last = 0
    for e in edits:
        i = _next_match(e, gold, last)
        if i is not None:
            n += 1
            last = i + 1
    return n


def best_edit_sequence(
    lat: Lattice, gold: Sequence[GoldEdit], deadline: Deadline | None = None
) -> list[LatticeEdit]:
    """Shortest path with lexicographic weights (-gold matches, distance of
    non-gold edges, number of non-gold edits).

    The search state carries the position in the gold list, so the number of
    matches it maximises is exactly what ``count_matches`` reports.
    """
    deadline = deadline or Deadline(None)
    out = lat.out_edges()
    State = tuple[Vertex, int]
    weight: dict[State, tuple[int, int, int]] = {(lat.start, 0): (0, 0, 0)}
    back: dict[State, tuple[State, LatticeEdit]] = {}
    for u in sorted(out):
        deadline.check()
        for last in range(len(gold) + 1):
            if (u, last) not in weight:
                continue
            g, d, k = weight[(u, last)]
            for v, e in out[u]:
                hit = None if e.noop else _next_match(e, gold, last)
                if e.noop:
                    w, nlast = (g, d + e.dist, k), last
                elif hit is not None:
                    w, nlast = (g - 1, d, k), hit + 1
                else:
                    w, nlast = (g, d + e.dist, k + 1), last
                key = (v, nlast)
                if key not in weight or w < weight[key]:
                    weight[key] = w
                    back[key] = ((u, last), e)
    goal = min(
        ((lat.goal, last) for last in range(len(gold) + 1) if (lat.goal, last) in weight),
        key=lambda s: (weight[s], s[1]),
    )
    path = []
    state = goal
    while state[0] != lat.start:
        state, e = back[state]
        path.append(e)
    path.reverse()
    return [e for e in path if not e.noop]


@dataclass(frozen=True)
class SentenceCounts:
    """Per-annotator (correct, proposed, gold) counts for one sentence."""

    per_annotator: tuple[tuple[int, int, int, int], ...]
    timed_out: bool = False


def score_sentence(
    source: Sequence[str],
    hyp: Sequence[str],
    record: M2Record,
    max_unchanged: int = DEFAULT_MAX_UNCHANGED,
    timeout: float | None = DEFAULT_TIMEOUT,
    lower: bool = True,
) -> SentenceCounts:
    annotators = record.annotator_ids or (0,)
    golds = {
        a: gold_edits_of(record, a, lower) if record.annotations else [] for a in annotators
    }
    if lower:
        source = [t.lower() for t in source]
        hyp = [t.lower() for t in hyp]
    deadline = Deadline(timeout)
    try:
        lat = build_lattice(source, hyp, max_unchanged, deadline)
        rows = []
        for a in annotators:
            edits = best_edit_sequence(lat, golds[a], deadline)
            rows.append((a, count_matches(edits, golds[a]), len(edits), len(golds[a])))
        return SentenceCounts(tuple(rows))
    except SentenceTimeout:
        return SentenceCounts(tuple((a, 0, 0, len(golds[a])) for a in annotators), timed_out=True)


def f_beta(correct: int, proposed: int, gold: int, beta: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    p = Fraction(correct, proposed) if proposed else Fraction(1)
    r = Fraction(correct, gold) if gold else Fraction(1)
    b2 = beta * beta
    denom = b2 * p + r
    f = (1 + b2) * p * r / denom if denom else Fraction(0)
    return p, r, f


@dataclass(frozen=True)
class GecScore:
    correct: int
    proposed: int
    gold: int
    beta: Fraction = Fraction(1, 2)
    sentences: int = 0
    timeouts: int = 0
    annotator_choices: tuple[tuple[int, int], ...] = ()

    @property
    def precision(self) -> Fraction:
        return f_beta(self.correct, self.proposed, self.gold, self.beta)[0]

    @property
    def recall(self) -> Fraction:
        return f_beta(self.correct, self.proposed, self.gold, self.beta)[1]

    @property
    def f(self) -> Fraction:
        return f_beta(self.correct, self.proposed, self.gold, self.beta)[2]

    @property
    def f1(self) -> Fraction:
        return f_beta(self.correct, self.proposed, self.gold, Fraction(1))[2]

    @property
    def f05(self) -> Fraction:
        return f_beta(self.correct, self.proposed, self.gold, Fraction(1, 2))[2]


def accumulate(counts: Iterable[SentenceCounts], beta: Fraction = Fraction(1, 2)) -> GecScore:
    """Ordered reduction: per sentence pick the annotator that maximises the
    running corpus F-score, then add its counts."""
    c = p = g = 0
    n = timeouts = 0
    choices: dict[int, int] = {}
    for sc in counts:
        n += 1
        timeouts += sc.timed_out
        best = None
        for a, cc, pp, gg in sc.per_annotator:
            f = f_beta(c + cc, p + pp, g + gg, beta)[2]
            key = (f, cc, -(pp + gg), -a)
            if best is None or key > best[0]:
                best = (key, a, cc, pp, gg)
        _, a, cc, pp, gg = best
        choices[a] = choices.get(a, 0) + 1
        c, p, g = c + cc, p + pp, g + gg
    return GecScore(c, p, g, beta, n, timeouts, tuple(sorted(choices.items())))


def _score_args(args):
    return score_sentence(*args)


def m2_score(
    sources: Sequence[Sequence[str]],
    hypotheses: Sequence[Sequence[str]],
    gold: Sequence[M2Record],
    beta: Fraction | float = Fraction(1, 2),
    max_unchanged: int = DEFAULT_MAX_UNCHANGED,
    timeout: float | None = DEFAULT_TIMEOUT,
    lower: bool = True,
    jobs: int = 1,
) -> GecScore:
    if not (len(sources) == len(hypotheses) == len(gold)):
        raise ValueError(
            f"sentence count mismatch: {len(sources)} sources, {len(hypotheses)} hypotheses, "
            f"{len(gold)} gold records"
        )
    for i, (src, rec) in enumerate(zip(sources, gold), start=1):
        if tuple(src) != rec.source_tokens:
            raise ValueError(f"source sentence {i} does not match the gold M2 source")
    beta = Fraction(beta).limit_denominator(1000)
    args = [
        (tuple(s), tuple(h), r, max_unchanged, timeout, lower)
        for s, h, r in zip(sources, hypotheses, gold)
    ]
    return accumulate(ordered_map(_score_args, args, jobs), beta)
