"""Corpus-level helpers shared by the command line and tests."""

from __future__ import annotations

from typing import Sequence

from .align import Alignment, extract_edits
from .annotate import AnnotatedPair, annotate_builtin, ingest_annotations
from .corpus import M2Edit, M2Record, SentencePair
from .costs import CostMatrix
from .parallel import ordered_map

ALIGNMENT_FORMAT_VERSION = 1


def _align_one(args: tuple[SentencePair, CostMatrix]) -> Alignment:
    return extract_edits(*args)


def align_corpus(pairs: Sequence[SentencePair], costs: CostMatrix, jobs: int = 1) -> list[Alignment]:
    return ordered_map(_align_one, [(p, costs) for p in pairs], jobs)


def annotate_corpus(
    pairs: Sequence[SentencePair],
    costs: CostMatrix,
    external: Sequence[Sequence[str]] | None = None,
    jobs: int = 1,
) -> list[AnnotatedPair]:
    alignments = align_corpus(pairs, costs, jobs)
    if external is None:
        return [annotate_builtin(p, a) for p, a in zip(pairs, alignments)]
    if len(external) != len(pairs):
        raise ValueError(f"external tag file has {len(external)} lines for {len(pairs)} sentences")
    return [ingest_annotations(p, a, tags) for p, a, tags in zip(pairs, alignments, external)]


def format_alignment(alignment: Alignment) -> str:
    lines = []
    for op in alignment.ops:
        lines.append(
            f"{op.kind}\t{op.source_span[0]}:{op.source_span[1]}\t{op.target_span[0]}:{op.target_span[1]}"
            f"\t{op.cost:.4f}\t{op.source_text}\t{op.target_text}\n"
        )
    return "".join(lines) + "\n"


def to_m2_record(ann: AnnotatedPair, annotator: int = 0) -> M2Record:
    edits = []
    for te in ann.edits():
        op = te.edit
        start, end = op.source_span
        edits.append(M2Edit(start, end, te.label, op.target_text))
    # insertions sort before a replacement starting at the same offset
    edits.sort(key=lambda e: (e.start, e.end))
    return M2Record(ann.pair.source.words, ((annotator, tuple(edits)),))


def parse_tag_lines(text: str) -> list[list[str]]:
    """One line per sentence; whitespace-separated tags, one per non-keep op."""
    text = text.replace("\r\n", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.split() for line in lines]


def format_tag_lines(corpus: Sequence[AnnotatedPair]) -> str:
    return "".join(" ".join(te.label for te in ann.edits()) + "\n" for ann in corpus)

