"""Error typing of extracted edits and projection to token-level GED labels."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import taxonomy as tx
from .align import DELETE, INSERT, KEEP, MERGE, REPLACE, SPLIT, Alignment, EditOp, is_punct
from .corpus import GedRecord, Sentence, SentencePair
from .costs import DIACRITICS

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 100

_ORTHO_FOLD = {"أ": "ا", "إ": "ا", "ى": "ي", "ة": "ه"}
_STRUCTURAL_FOR_KIND = {
    KEEP: tx.CORRECT,
    MERGE: tx.MERGE,
    SPLIT: tx.SPLIT,
    DELETE: tx.DELETE,
    INSERT: tx.INSERT,
}
_ALIASES = {"MG": tx.MERGE, "SP": tx.SPLIT}


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class TypedEdit:
    edit: EditOp
    tags: frozenset[str]
    unknown: frozenset[str] = field(default=frozenset())

    @property
    def kind(self) -> str:
        return self.edit.kind

    @property
    def label(self) -> str:
        return tx.join_tags(self.tags)


@dataclass(frozen=True)
class AnnotatedPair:
    pair: SentencePair
    typed_edits: tuple[TypedEdit, ...]

    @property
    def alignment(self) -> Alignment:
        return Alignment(
            tuple(te.edit for te in self.typed_edits), len(self.pair.source), len(self.pair.target)
        )

    def edits(self) -> list[TypedEdit]:
        return [te for te in self.typed_edits if te.kind != KEEP]


# -- built-in classifier ---------------------------------------------------

def _split_edges(text: str) -> tuple[str, str, str]:
    lo, hi = 0, len(text)
    while lo < hi and is_punct(text[lo]):
        lo += 1
    while hi > lo and is_punct(text[hi - 1]):
        hi -= 1
    return text[:lo], text[lo:hi], text[hi:]


def ortho_fold(text: str) -> str:
    """Collapse the common orthographic confusions and drop diacritics."""
    return "".join(_ORTHO_FOLD.get(ch, ch) for ch in text if ch not in DIACRITICS)


def classify_builtin(edit: EditOp) -> frozenset[str]:
    if edit.kind != REPLACE:
        return frozenset({_STRUCTURAL_FOR_KIND[edit.kind]})
    src, tgt = edit.source_words[0], edit.target_words[0]
    if is_punct(src) and is_punct(tgt):
        return frozenset({"P"})
    pre_s, core_s, post_s = _split_edges(src)
    pre_t, core_t, post_t = _split_edges(tgt)
    edges_differ = (pre_s, post_s) != (pre_t, post_t)
    if core_s and core_t:
        if core_s == core_t:
            return frozenset({"P"})
        if ortho_fold(core_s) == ortho_fold(core_t):
            return frozenset({"O", "P"}) if edges_differ else frozenset({"O"})
    return frozenset({tx.UNK})


def annotate_builtin(pair: SentencePair, alignment: Alignment) -> AnnotatedPair:
    return AnnotatedPair(pair, tuple(TypedEdit(op, classify_builtin(op)) for op in alignment.ops))


# -- external annotations --------------------------------------------------

def ingest_annotations(
    pair: SentencePair, alignment: Alignment, external: Sequence[str]
) -> AnnotatedPair:
    """Attach externally produced tags (one string per non-keep op, in order)."""
    edits = [op for op in alignment.ops if op.kind != KEEP]
    if len(external) != len(edits):
        raise AnnotationError(
            f"expected {len(edits)} external tags, got {len(external)}"
            + (f" (sentence {pair.source.id})" if pair.source.id else "")
        )
    typed = []
    tags_iter = iter(external)
    for op in alignment.ops:
        if op.kind == KEEP:
            typed.append(TypedEdit(op, frozenset({tx.CORRECT})))
            continue
        parts = [_ALIASES.get(t, t) for t in tx.split_label(next(tags_iter))]
        tags = set(parts)
        if op.kind != REPLACE:
            tags.add(_STRUCTURAL_FOR_KIND[op.kind])
        unknown = frozenset(t for t in parts if not tx.is_known(t))
        typed.append(TypedEdit(op, frozenset(tags), unknown))
    return AnnotatedPair(pair, tuple(typed))


def edit_tag_strings(ann: AnnotatedPair) -> list[str]:
    """Tag strings for non-keep ops, in the format accepted by ingestion."""
    return [te.label for te in ann.edits()]


# -- GED projection ----------------------------------------------------------

def fine_label(te: TypedEdit, modeled: frozenset[str] | None = None) -> str:
    """Fine-grained label for a single-source-token op (K, R, S, D)."""
    if te.kind == KEEP:
        return tx.CORRECT
    if te.kind == DELETE:
        return tx.DELETE
    label = te.label or tx.UNK
    if modeled is not None and label not in modeled and label not in tx.ALWAYS_MODELED:
        return tx.UNK
    return label


def _fine_token_labels(ann: AnnotatedPair, modeled: frozenset[str] | None) -> list[str]:
    labels: list[str] = []
    for te in ann.typed_edits:
        kind = te.kind
        if kind == INSERT:
            continue
        if kind == MERGE:
            n = te.edit.source_span[1] - te.edit.source_span[0]
            labels.append(tx.MERGE_B)
            labels.extend([tx.MERGE_I] * (n - 1))
        else:
            labels.append(fine_label(te, modeled))
    return labels


def project_ged_labels(
    ann: AnnotatedPair, granularity: int = 43, modeled: frozenset[str] | None = None
) -> GedRecord:
    """One label per source token. ``modeled`` restricts fine labels; labels
    outside it become UNK. Coarser granularities are reductions of the fine labels."""
    labels = [tx.project_label(lab, granularity) for lab in _fine_token_labels(ann, modeled)]
    return GedRecord(ann.pair.source.words, tuple(labels))


def project_record(rec: GedRecord, granularity: int) -> GedRecord:
    return GedRecord(rec.tokens, tuple(tx.project_label(lab, granularity) for lab in rec.labels))


def count_tag_frequencies(corpus: Iterable[AnnotatedPair]) -> Counter:
    counts: Counter = Counter()
    for ann in corpus:
        counts.update(_fine_token_labels(ann, None))
    return counts


def modeled_labels(counts: Counter, threshold: int = DEFAULT_THRESHOLD) -> frozenset[str]:
    """Structural labels plus every combination seen more than ``threshold`` times."""
    return frozenset(tx.ALWAYS_MODELED | {lab for lab, c in counts.items() if c > threshold})


# -- detection-guided preprocessing ------------------------------------------

def orphan_merge_count(labels: Sequence[str]) -> int:
    n = 0
    merging = False
    for lab in labels:
        if lab == tx.MERGE_I and not merging:
            n += 1
        merging = lab == tx.MERGE_B or (lab == tx.MERGE_I and merging)
    return n


def resolve_detections(source: Sentence, labels: GedRecord | Sequence[str]) -> Sentence:
    """Drop tokens labeled Delete and join Merge-B Merge-I* runs into one token."""
    labs = labels.labels if isinstance(labels, GedRecord) else tuple(labels)
    words = source.words
    if len(labs) != len(words):
        raise ValueError(f"{len(labs)} labels for {len(words)} tokens")
    out: list[str] = []
    merging = False
    orphans = 0
    for word, lab in zip(words, labs):
        if lab == tx.DELETE:
            merging = False
            continue
        if lab == tx.MERGE_B:
            out.append(word)
            merging = True
        elif lab == tx.MERGE_I and merging:
            out[-1] += word
        else:
            if lab == tx.MERGE_I:
                orphans += 1
            out.append(word)
            merging = False
    if orphans:
        log.warning("sentence %s: %d Merge-I label(s) without Merge-B passed through", source.id, orphans)
    return Sentence.from_words(out, source.id)


# -- corpus statistics -------------------------------------------------------

@dataclass(frozen=True)
class Distribution:
    granularity: int
    counts: dict[str, int]
    total: int
    punctuation: int

    def percent(self, label: str) -> float:
        return 100.0 * self.counts.get(label, 0) / self.total if self.total else 0.0

    @property
    def punctuation_share(self) -> float:
        return self.punctuation / self.total if self.total else 0.0

    def rows(self) -> list[tuple[str, int, float]]:
        ordered = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [(lab, c, self.percent(lab)) for lab, c in ordered]


def edit_class(te: TypedEdit, granularity: int) -> str:
    if granularity == 2:
        return tx.ERROR
    if te.kind in (MERGE, INSERT, DELETE):
        return _STRUCTURAL_FOR_KIND[te.kind]
    if granularity == 43:
        return te.label or tx.UNK
    return tx.to_coarse(te.label)


def _is_punct_edit(te: TypedEdit) -> bool:
    if any(tx.tag_class(t) == "P" for t in te.tags):
        return True
    words = te.edit.source_words + te.edit.target_words
    return bool(words) and all(is_punct(w) for w in words)


def error_distribution(corpus: Iterable[AnnotatedPair], granularity: int = 13) -> Distribution:
    counts: Counter = Counter()
    punct = 0
    for ann in corpus:
        for te in ann.edits():
            counts[edit_class(te, granularity)] += 1
            punct += _is_punct_edit(te)
    return Distribution(granularity, dict(counts), sum(counts.values()), punct)
