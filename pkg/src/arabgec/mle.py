"""Bigram maximum-likelihood lookup corrector.

Maps an erroneous word (or a merge phrase) to the correction that maximises
P(correction | word, previous word, error label), backing off to
P(correction | word, error label) and finally passing the word through.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import taxonomy as tx
from .align import DELETE, INSERT, KEEP, MERGE
from .annotate import AnnotatedPair, fine_label
from .corpus import FormatError, GedRecord, Sentence

BOS = "<s>"
MODEL_HEADER = "#arabgec-mle\tv1"


def edit_label(kind: str, fine: str, granularity: int) -> str:
    if kind == KEEP:
        return tx.CORRECT
    if granularity == 2:
        return tx.ERROR
    if kind == MERGE:
        return tx.MERGE
    if kind == DELETE:
        return tx.DELETE
    return tx.project_label(fine, granularity)


def token_label(label: str) -> str:
    """Error label used for lookup, given a token's GED label."""
    if label in (tx.MERGE_B, tx.MERGE_I):
        return tx.MERGE
    return label


@dataclass
class MleModel:
    granularity: int = 43
    bigram: dict[tuple[str, str, str], Counter] = field(default_factory=lambda: defaultdict(Counter))
    unigram: dict[tuple[str, str], Counter] = field(default_factory=lambda: defaultdict(Counter))
    # label-marginal views, used when no error labels are available
    bigram_any: dict[tuple[str, str], Counter] = field(default_factory=lambda: defaultdict(Counter))
    unigram_any: dict[str, Counter] = field(default_factory=lambda: defaultdict(Counter))

    def add(self, prev: str, word: str, label: str, correction: str, count: int = 1) -> None:
        if count < 1:
            raise ValueError("counts must be >= 1")
        self.bigram[(prev, word, label)][correction] += count
        self.unigram[(word, label)][correction] += count
        self.bigram_any[(prev, word)][correction] += count
        self.unigram_any[word][correction] += count

    def lookup(self, prev: str, word: str, label: str | None = None) -> tuple[str, float] | None:
        """Return ``(correction, probability)`` or None if ``word`` is unseen.

        ``label=None`` marginalises over error labels.
        """
        if label is None:
            tables = (self.bigram_any.get((prev, word)), self.unigram_any.get(word))
        else:
            tables = (self.bigram.get((prev, word, label)), self.unigram.get((word, label)))
        for counts in tables:
            if counts:
                return _argmax(counts)
        return None

    # -- serialisation --

    def dumps(self) -> str:
        lines = [MODEL_HEADER, f"#granularity\t{self.granularity}"]
        for (p, w, e), corr in sorted(self.bigram.items()):
            for c, n in sorted(corr.items()):
                lines.append(f"B\t{p}\t{w}\t{e}\t{c}\t{n}")
        for (w, e), corr in sorted(self.unigram.items()):
            for c, n in sorted(corr.items()):
                lines.append(f"U\t{w}\t{e}\t{c}\t{n}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> MleModel:
        lines = text.replace("\r\n", "\n").split("\n")
        if not lines or lines[0] != MODEL_HEADER:
            raise FormatError("not an MLE model file (bad header)")
        model = cls()
        bigrams, unigrams = [], []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            parts = line.split("\t")
            try:
                if parts[0] == "#granularity":
                    model.granularity = int(parts[1])
                elif parts[0] == "B" and len(parts) == 6:
                    bigrams.append((parts[1], parts[2], parts[3], parts[4], int(parts[5])))
                elif parts[0] == "U" and len(parts) == 5:
                    unigrams.append((parts[1], parts[2], parts[3], int(parts[4])))
                else:
                    raise ValueError
            except (ValueError, IndexError):
                raise FormatError(f"malformed model line {lineno}") from None
        # unigram rows are implied by the bigram rows; keep them as a consistency check
        for p, w, e, c, n in bigrams:
            model.add(p, w, e, c, n)
        for w, e, c, n in unigrams:
            if model.unigram.get((w, e), {}).get(c) != n:
                raise FormatError(f"unigram count for {w!r} is inconsistent with bigram rows")
        if sum(map(len, model.unigram.values())) != len(unigrams):
            raise FormatError("unigram rows do not match bigram rows")
        return model


def _argmax(counts: Counter) -> tuple[str, float]:
    best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return best[0], best[1] / sum(counts.values())


def training_events(ann: AnnotatedPair, granularity: int = 43, modeled=None):
    """Yield ``(prev, word, label, correction)`` for every op with a source side."""
    src = ann.pair.source.words
    for te in ann.typed_edits:
        op = te.edit
        if op.kind == INSERT:
            continue
        start = op.source_span[0]
        prev = src[start - 1] if start > 0 else BOS
        fine = fine_label(te, modeled) if op.kind != MERGE else tx.MERGE
        yield prev, op.source_text, edit_label(op.kind, fine, granularity), op.target_text


def mle_train(corpus: Iterable[AnnotatedPair], granularity: int = 43, modeled=None) -> MleModel:
    model = MleModel(granularity)
    for ann in corpus:
        for prev, word, label, corr in training_events(ann, granularity, modeled):
            model.add(prev, word, label, corr)
    return model


def mle_apply(
    model: MleModel, sentence: Sentence, labels: GedRecord | Sequence[str] | None = None
) -> Sentence:
    words = sentence.words
    labs = None
    if labels is not None:
        labs = labels.labels if isinstance(labels, GedRecord) else tuple(labels)
        if len(labs) != len(words):
            raise ValueError(f"{len(labs)} labels for {len(words)} tokens")
    out: list[str] = []
    i = 0
    while i < len(words):
        prev = words[i - 1] if i > 0 else BOS
        if labs is not None and labs[i] == tx.MERGE_B:
            j = i + 1
            while j < len(words) and labs[j] == tx.MERGE_I:
                j += 1
            hit = None
            for end in range(j, i + 1, -1):
                hit = model.lookup(prev, " ".join(words[i:end]), tx.MERGE)
                if hit:
                    out.extend(hit[0].split())
                    i = end
                    break
            if hit:
                continue
        label = token_label(labs[i]) if labs is not None else None
        hit = model.lookup(prev, words[i], label)
        out.extend(hit[0].split() if hit else [words[i]])
        i += 1
    return Sentence.from_words(out, sentence.id)
