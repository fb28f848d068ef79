"""Core corpus types and readers/writers for parallel text, M2 and GED files."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

NOOP = "noop"
DEFAULT_REQUIRED = "REQUIRED"
DEFAULT_COMMENT = "-NONE-"


class FormatError(ValueError):
    """Raised when an input file does not follow the expected format."""


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Token:
    text: str
    index: int

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")
        if any(ch.isspace() for ch in self.text):
            raise ValueError(f"token contains whitespace: {self.text!r}")
        if self.index < 0:
            raise ValueError("token index must be >= 0")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    id: str = ""

    def __post_init__(self):
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError(f"token {tok.text!r} has index {tok.index}, expected {i}")

    @classmethod
    def from_words(cls, words: Iterable[str], id: str = "") -> Sentence:
        return cls(tuple(Token(nfc(w), i) for i, w in enumerate(words)), id)

    @classmethod
    def from_text(cls, line: str, id: str = "") -> Sentence:
        return cls.from_words(nfc(line).split(), id)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class SentencePair:
    source: Sentence
    target: Sentence

    def __post_init__(self):
        if not self.source.tokens and not self.target.tokens:
            raise ValueError("empty sentence pair")

    @classmethod
    def from_text(cls, source: str, target: str, id: str = "") -> SentencePair:
        return cls(Sentence.from_text(source, id), Sentence.from_text(target, id))


@dataclass(frozen=True)
class M2Edit:
    start: int
    end: int
    error_type: str
    correction: str
    required: str = DEFAULT_REQUIRED
    comment: str = DEFAULT_COMMENT

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span {self.start} {self.end}")
        if self.start == self.end and not self.correction:
            raise ValueError(f"insertion at {self.start} has an empty correction")

    @property
    def is_deletion(self) -> bool:
        return not self.correction and self.end > self.start


@dataclass(frozen=True)
class M2Record:
    """A source sentence with the edit sets of zero or more annotators.

    ``annotations`` is a tuple of ``(annotator_id, edits)``; an annotator with
    an empty edit tuple stands for a "noop" annotation.
    """

    source_tokens: tuple[str, ...]
    annotations: tuple[tuple[int, tuple[M2Edit, ...]], ...] = ()

    def __post_init__(self):
        seen = set()
        n = len(self.source_tokens)
        for annotator, edits in self.annotations:
            if annotator in seen:
                raise ValueError(f"duplicate annotator id {annotator}")
            seen.add(annotator)
            prev_end = -1
            prev_start = -1
            for e in edits:
                if e.end > n:
                    raise ValueError(f"edit {e.start} {e.end} exceeds sentence length {n}")
                if e.start < prev_start:
                    raise ValueError(f"edits of annotator {annotator} are not sorted")
                if e.start < prev_end:
                    raise ValueError(f"overlapping edits for annotator {annotator} at {e.start} {e.end}")
                prev_start = e.start
                prev_end = max(prev_end, e.end)

    @property
    def annotator_ids(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.annotations)

    def edits_for(self, annotator: int) -> tuple[M2Edit, ...]:
        for a, edits in self.annotations:
            if a == annotator:
                return edits
        raise KeyError(annotator)


@dataclass(frozen=True)
class GedRecord:
    tokens: tuple[str, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.tokens) != len(self.labels):
            raise ValueError(
                f"label count {len(self.labels)} does not match token count {len(self.tokens)}"
            )


# -- parallel text ---------------------------------------------------------

def _read_lines(path) -> list[str]:
    # newline=None folds CRLF/CR into LF
    with open(path, encoding="utf-8", newline=None) as fh:
        text = fh.read()
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def read_sentences(path, allow_empty: bool = False) -> list[Sentence]:
    out = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip() and not allow_empty:
            raise FormatError(f"{path}: empty line at line {lineno}")
        out.append(Sentence.from_text(line, str(lineno)))
    return out


def read_parallel(source_path, target_path) -> list[SentencePair]:
    src = _read_lines(source_path)
    tgt = _read_lines(target_path)
    if len(src) != len(tgt):
        raise FormatError(f"line count mismatch {len(src)} vs {len(tgt)}")
    pairs = []
    for lineno, (s, t) in enumerate(zip(src, tgt), start=1):
        if not s.strip():
            raise FormatError(f"{source_path}: empty line at line {lineno}")
        if not t.strip():
            raise FormatError(f"{target_path}: empty line at line {lineno}")
        pairs.append(SentencePair.from_text(s, t, str(lineno)))
    return pairs


def write_sentences(sentences: Iterable[Sentence]) -> str:
    return "".join(s.text() + "\n" for s in sentences)


# -- M2 --------------------------------------------------------------------

def _parse_a_line(line: str, lineno: int) -> tuple[int, M2Edit | None]:
    fields = line[2:].split("|||")
    if len(fields) != 6:
        raise FormatError(f"malformed A-line at line {lineno}: expected 6 fields")
    span, etype, correction, required, comment, annotator = fields
    parts = span.split()
    if len(parts) != 2:
        raise FormatError(f"malformed span at line {lineno}")
    try:
        start, end = int(parts[0]), int(parts[1])
        annotator_id = int(annotator)
    except ValueError:
        raise FormatError(f"non-integer offset at line {lineno}") from None
    if etype == NOOP or (start == -1 and end == -1):
        return annotator_id, None
    if end < start:
        raise FormatError(f"end < start at line {lineno}")
    try:
        edit = M2Edit(start, end, etype, nfc(correction), required, comment)
    except ValueError as exc:
        raise FormatError(f"{exc} at line {lineno}") from None
    return annotator_id, edit


def parse_m2(text: str) -> list[M2Record]:
    records: list[M2Record] = []
    source: tuple[str, ...] | None = None
    groups: dict[int, list[M2Edit]] = {}
    start_line = 0

    def flush():
        nonlocal source, groups
        if source is None:
            return
        annotations = []
        for annotator in sorted(groups):
            edits = sorted(groups[annotator], key=lambda e: (e.start, e.end))
            annotations.append((annotator, tuple(edits)))
        try:
            records.append(M2Record(source, tuple(annotations)))
        except ValueError as exc:
            raise FormatError(f"{exc} in record starting at line {start_line}") from None
        source = None
        groups = {}

    text = text.replace("\r\n", "\n")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.startswith("S ") or line == "S":
            flush()
            source = tuple(nfc(line[2:]).split())
            start_line = lineno
        elif line.startswith("A "):
            if source is None:
                raise FormatError(f"A-line before any S-line at line {lineno}")
            annotator, edit = _parse_a_line(line, lineno)
            bucket = groups.setdefault(annotator, [])
            if edit is not None:
                if edit.end > len(source):
                    raise FormatError(
                        f"offset {edit.end} beyond sentence length {len(source)} at line {lineno}"
                    )
                bucket.append(edit)
        elif not line.strip():
            flush()
        else:
            raise FormatError(f"unrecognised line at line {lineno}")
    flush()
    return records


def read_m2(path) -> list[M2Record]:
    with open(path, encoding="utf-8", newline=None) as fh:
        return parse_m2(fh.read())


def format_a_line(edit: M2Edit | None, annotator: int) -> str:
    if edit is None:
        return f"A -1 -1|||{NOOP}|||-NONE-|||{DEFAULT_REQUIRED}|||{DEFAULT_COMMENT}|||{annotator}"
    return (
        f"A {edit.start} {edit.end}|||{edit.error_type}|||{edit.correction}"
        f"|||{edit.required}|||{edit.comment}|||{annotator}"
    )


def write_m2(records: Iterable[M2Record]) -> str:
    lines = []
    for rec in records:
        lines.append("S " + " ".join(rec.source_tokens))
        for annotator, edits in rec.annotations:
            if not edits:
                lines.append(format_a_line(None, annotator))
            for e in edits:
                lines.append(format_a_line(e, annotator))
        lines.append("")
    return "".join(line + "\n" for line in lines)


# -- GED two-column TSV ----------------------------------------------------

def parse_ged(text: str) -> list[GedRecord]:
    """Parse ``token<TAB>label`` lines; every blank line closes one record."""
    records = []
    tokens: list[str] = []
    labels: list[str] = []
    text = text.replace("\r\n", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if line == "":
            records.append(GedRecord(tuple(tokens), tuple(labels)))
            tokens, labels = [], []
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise FormatError(f"malformed GED line at line {lineno}")
        tokens.append(nfc(parts[0]))
        labels.append(parts[1])
    if tokens:
        records.append(GedRecord(tuple(tokens), tuple(labels)))
    return records


def read_ged(path) -> list[GedRecord]:
    with open(path, encoding="utf-8", newline=None) as fh:
        return parse_ged(fh.read())


def write_ged(records: Iterable[GedRecord]) -> str:
    out = []
    for rec in records:
        for tok, lab in zip(rec.tokens, rec.labels):
            out.append(f"{tok}\t{lab}\n")
        out.append("\n")
    return "".join(out)


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")

