"""Token alignment of erroneous/corrected sentence pairs.

Two stages: a token-level DP whose substitution cost is the character-level
weighted edit distance between tokens, followed by greedy fusion of adjacent
operations into merges (many-to-one) and splits (one-to-many).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable

from .corpus import SentencePair
from .costs import CostMatrix, token_distance

KEEP, REPLACE, INSERT, DELETE, MERGE, SPLIT = "K", "R", "I", "D", "M", "S"
KINDS = (KEEP, REPLACE, INSERT, DELETE, MERGE, SPLIT)

_EPS = 1e-9


def is_punct(text: str) -> bool:
    return bool(text) and all(unicodedata.category(ch).startswith("P") for ch in text)


@dataclass(frozen=True)
class EditOp:
    kind: str
    source_span: tuple[int, int]
    target_span: tuple[int, int]
    cost: float
    source_words: tuple[str, ...] = ()
    target_words: tuple[str, ...] = ()

    def __post_init__(self):
        ns = self.source_span[1] - self.source_span[0]
        nt = self.target_span[1] - self.target_span[0]
        if ns < 0 or nt < 0 or self.cost < 0:
            raise ValueError(f"invalid op {self}")
        if len(self.source_words) != ns or len(self.target_words) != nt:
            raise ValueError("span/word count mismatch")
        shape_ok = {
            KEEP: ns == 1 and nt == 1 and self.source_words == self.target_words,
            REPLACE: ns == 1 and nt == 1,
            INSERT: ns == 0 and nt == 1,
            DELETE: ns == 1 and nt == 0,
            MERGE: ns >= 2 and nt == 1,
            SPLIT: ns == 1 and nt >= 2,
        }.get(self.kind)
        if not shape_ok:
            raise ValueError(f"op kind {self.kind} does not fit spans {ns}->{nt}")

    @property
    def source_text(self) -> str:
        return " ".join(self.source_words)

    @property
    def target_text(self) -> str:
        return " ".join(self.target_words)


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]
    source_len: int = 0
    target_len: int = 0

    def __post_init__(self):
        si = ti = 0
        for op in self.ops:
            if op.source_span[0] != si or op.target_span[0] != ti:
                raise ValueError("op spans do not partition the sentences in order")
            si, ti = op.source_span[1], op.target_span[1]
        if si != self.source_len or ti != self.target_len:
            raise ValueError("op spans do not cover the sentences")

    @property
    def total_cost(self) -> float:
        return sum(op.cost for op in self.ops)

    def char_cost(self, costs: CostMatrix | None = None) -> float:
        """Cumulative character edit distance (token indel penalties excluded)."""
        costs = costs or CostMatrix()
        return sum(op_char_cost(op, costs) for op in self.ops)

    def edits(self) -> list[EditOp]:
        return [op for op in self.ops if op.kind != KEEP]


def op_char_cost(op: EditOp, costs: CostMatrix) -> float:
    if op.kind == INSERT:
        return costs.string_indel(op.target_words[0])
    if op.kind == DELETE:
        return costs.string_indel(op.source_words[0])
    return op.cost


def _make_op(kind, s0, s1, t0, t1, cost, src, tgt) -> EditOp:
    return EditOp(kind, (s0, s1), (t0, t1), cost, tuple(src[s0:s1]), tuple(tgt[t0:t1]))


def align_basic(pair: SentencePair, costs: CostMatrix | None = None) -> Alignment:
    """Minimal-cost monotone alignment using keep/replace/insert/delete only."""
    costs = costs or CostMatrix()
    src, tgt = pair.source.words, pair.target.words
    n, m = len(src), len(tgt)
    dels = [costs.token_indel(w) for w in src]
    inss = [costs.token_indel(w) for w in tgt]
    subs = [[token_distance(a, b, costs) for b in tgt] for a in src]

    dp = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = dp[i - 1][0] + dels[i - 1]
    for j in range(1, m + 1):
        dp[0][j] = dp[0][j - 1] + inss[j - 1]
    for i in range(1, n + 1):
        row, prev = dp[i], dp[i - 1]
        sub_row, d = subs[i - 1], dels[i - 1]
        for j in range(1, m + 1):
            row[j] = min(prev[j - 1] + sub_row[j - 1], prev[j] + d, row[j - 1] + inss[j - 1])

    # backtrace preferring diagonal, then delete, then insert
    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dp[i][j]
        if i > 0 and j > 0 and abs(dp[i - 1][j - 1] + subs[i - 1][j - 1] - here) <= _EPS:
            kind = KEEP if src[i - 1] == tgt[j - 1] else REPLACE
            ops.append(_make_op(kind, i - 1, i, j - 1, j, subs[i - 1][j - 1], src, tgt))
            i, j = i - 1, j - 1
        elif i > 0 and abs(dp[i - 1][j] + dels[i - 1] - here) <= _EPS:
            ops.append(_make_op(DELETE, i - 1, i, j, j, dels[i - 1], src, tgt))
            i -= 1
        else:
            ops.append(_make_op(INSERT, i, i, j - 1, j, inss[j - 1], src, tgt))
            j -= 1
    ops.reverse()
    return Alignment(tuple(ops), n, m)


def _window_shape(ops: list[EditOp], lo: int, hi: int) -> tuple[int, int, int, int]:
    s0, t0 = ops[lo].source_span[0], ops[lo].target_span[0]
    s1, t1 = ops[hi].source_span[1], ops[hi].target_span[1]
    return s0, s1, t0, t1


def fusion_candidates(ops: list[EditOp], costs: CostMatrix) -> Iterable[tuple[float, int, int, EditOp]]:
    """Yield ``(gain, lo, hi, fused_op)`` for every contiguous op window that
    forms a merge (n>=2 source tokens onto one target token) or a split.

    Gain is measured in character edit distance, so token indel penalties do
    not by themselves make a fusion attractive. Punctuation-only tokens never
    take part in a fusion: gluing a word to an inserted comma is not a split.
    """
    src_all: list[str] = []
    tgt_all: list[str] = []
    for op in ops:
        src_all.extend(op.source_words)
        tgt_all.extend(op.target_words)
    for lo in range(len(ops)):
        unfused = 0.0
        for hi in range(lo, len(ops)):
            if any(map(is_punct, ops[hi].source_words + ops[hi].target_words)):
                break
            unfused += op_char_cost(ops[hi], costs)
            if hi == lo:
                continue
            s0, s1, t0, t1 = _window_shape(ops, lo, hi)
            ns, nt = s1 - s0, t1 - t0
            if ns >= 2 and nt >= 2:
                break
            if ns >= 2 and nt == 1:
                kind = MERGE
            elif ns == 1 and nt >= 2:
                kind = SPLIT
            else:
                continue
            fused = token_distance("".join(src_all[s0:s1]), "".join(tgt_all[t0:t1]), costs)
            gain = unfused - fused
            if gain > _EPS:
                yield gain, lo, hi, _make_op(kind, s0, s1, t0, t1, fused, src_all, tgt_all)


def refine_merge_split(alignment: Alignment, costs: CostMatrix | None = None) -> Alignment:
    """Greedily fuse adjacent ops into merges/splits until no fusion lowers
    the cumulative edit distance. Largest gain wins each pass; leftmost on ties."""
    costs = costs or CostMatrix()
    ops = list(alignment.ops)
    while True:
        best = None
        for cand in fusion_candidates(ops, costs):
            if best is None or cand[0] > best[0] + _EPS:
                best = cand
        if best is None:
            break
        _, lo, hi, fused = best
        ops[lo:hi + 1] = [fused]
    return Alignment(tuple(ops), alignment.source_len, alignment.target_len)


def extract_edits(pair: SentencePair, costs: CostMatrix | None = None) -> Alignment:
    costs = costs or CostMatrix()
    return refine_merge_split(align_basic(pair, costs), costs)


# -- alignment evaluation --------------------------------------------------

def alignment_links(alignment: Alignment) -> set[tuple[int, int]]:
    links = set()
    for op in alignment.ops:
        if op.kind in (INSERT, DELETE):
            continue
        for s in range(*op.source_span):
            for t in range(*op.target_span):
                links.add((s, t))
    return links


@dataclass(frozen=True)
class AlignmentScore:
    matched: int
    predicted: int
    gold: int

    @property
    def precision(self) -> float:
        return self.matched / self.predicted if self.predicted else 1.0

    @property
    def recall(self) -> float:
        return self.matched / self.gold if self.gold else 1.0

    @property
    def aer(self) -> float:
        total = self.predicted + self.gold
        return 1.0 - 2 * self.matched / total if total else 0.0

    def __add__(self, other: AlignmentScore) -> AlignmentScore:
        return AlignmentScore(
            self.matched + other.matched, self.predicted + other.predicted, self.gold + other.gold
        )


def alignment_eval(predicted: Alignment | set, gold: set) -> AlignmentScore:
    pred = alignment_links(predicted) if isinstance(predicted, Alignment) else set(predicted)
    gold = set(gold)
    return AlignmentScore(len(pred & gold), len(pred), len(gold))


def corpus_alignment_eval(pairs: Iterable[tuple[Alignment | set, set]]) -> AlignmentScore:
    total = AlignmentScore(0, 0, 0)
    for pred, gold in pairs:
        total = total + alignment_eval(pred, gold)
    return total


def parse_links(line: str) -> set[tuple[int, int]]:
    """Parse Pharaoh-style ``s-t`` link lists (``0-0 1-2``)."""
    links = set()
    for item in line.split():
        s, _, t = item.partition("-")
        links.add((int(s), int(t)))
    return links


def format_links(links: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{s}-{t}" for s, t in sorted(links))
