"""Command-line entry point: ``arabgec <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input or arguments and 2 when a
file cannot be read or written.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .align import corpus_alignment_eval, parse_links
from .annotate import (
    count_tag_frequencies,
    error_distribution,
    modeled_labels,
    project_ged_labels,
    project_record,
    resolve_detections,
)
from .config import Config, load_config
from .corpus import (
    FormatError,
    GedRecord,
    read_ged,
    read_m2,
    read_parallel,
    read_sentences,
    write_ged,
    write_m2,
    write_sentences,
)
from .mle import MODEL_HEADER, MleModel, mle_apply, mle_train
from .pipeline import (
    ALIGNMENT_FORMAT_VERSION,
    align_corpus,
    annotate_corpus,
    format_alignment,
    format_tag_lines,
    parse_tag_lines,
    to_m2_record,
)
from .scoring import alignment_report, gec_report, ged_report, ged_score, m2_score

log = logging.getLogger("arabgec")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(ValueError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for I/O failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _version_text() -> str:
    model_version = MODEL_HEADER.split("\t")[1]
    return (
        f"arabgec {__version__} "
        f"(alignment format v{ALIGNMENT_FORMAT_VERSION}, mle model {model_version}, "
        f"m2 text, ged two-column tsv)"
    )


# -- helpers -----------------------------------------------------------------

def _emit(path: str | None, text: str) -> None:
    if path and path != "-":
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.flush()


def _need(value: str | None, flag: str) -> str:
    if not value:
        raise UsageError(f"missing required option {flag}")
    return value


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8", newline=None) as fh:
        return fh.read()


def _read_tags(path: str | None):
    return parse_tag_lines(_read_text(path)) if path else None


def _read_label_set(path: str) -> frozenset[str]:
    return frozenset(line.strip() for line in _read_text(path).splitlines() if line.strip())


def _modeled(args, corpus) -> frozenset[str]:
    if args.modeled:
        return _read_label_set(args.modeled)
    return modeled_labels(count_tag_frequencies(corpus), args.cfg.threshold)


def _pairs(args):
    cfg = args.cfg
    return read_parallel(_need(cfg.src, "--src"), _need(cfg.tgt, "--tgt"))


# -- subcommands ---------------------------------------------------------------

def cmd_align(args) -> None:
    cfg = args.cfg
    pairs = _pairs(args)
    alignments = align_corpus(pairs, cfg.costs(), cfg.jobs)
    _emit(cfg.out, "".join(format_alignment(a) for a in alignments))
    if args.m2:
        corpus = annotate_corpus(pairs, cfg.costs(), jobs=cfg.jobs)
        _emit(args.m2, write_m2(to_m2_record(ann) for ann in corpus))
    if args.gold_links:
        gold = [parse_links(line) for line in _read_text(args.gold_links).splitlines()]
        if len(gold) != len(alignments):
            raise ValueError(f"{len(gold)} gold link lines for {len(alignments)} sentences")
        score = corpus_alignment_eval(zip(alignments, gold))
        sys.stderr.write(alignment_report(score))


def cmd_annotate(args) -> None:
    cfg = args.cfg
    corpus = annotate_corpus(_pairs(args), cfg.costs(), _read_tags(args.external), cfg.jobs)
    for ann in corpus:
        for te in ann.edits():
            if te.unknown:
                log.warning("sentence %s: unknown tag(s) %s", ann.pair.source.id, ",".join(sorted(te.unknown)))
    _emit(cfg.out, write_m2(to_m2_record(ann) for ann in corpus))
    if args.out_tags:
        _emit(args.out_tags, format_tag_lines(corpus))
    modeled = _modeled(args, corpus)
    if args.out_modeled:
        _emit(args.out_modeled, "".join(lab + "\n" for lab in sorted(modeled)))
    if args.out_ged:
        records = [project_ged_labels(ann, cfg.granularity, modeled) for ann in corpus]
        _emit(args.out_ged, write_ged(records))


def cmd_project(args) -> None:
    cfg = args.cfg
    records = read_ged(_need(args.ged, "--ged"))
    _emit(cfg.out, write_ged(project_record(r, cfg.granularity) for r in records))


def cmd_preprocess(args) -> None:
    cfg = args.cfg
    sentences = read_sentences(_need(cfg.src, "--src"))
    records = read_ged(_need(args.ged, "--ged"))
    if len(records) != len(sentences):
        raise ValueError(f"{len(records)} GED records for {len(sentences)} sentences")
    out = []
    for sent, rec in zip(sentences, records):
        if sent.words != rec.tokens:
            raise ValueError(f"sentence {sent.id}: GED tokens do not match the source")
        out.append(resolve_detections(sent, rec))
    _emit(cfg.out, write_sentences(out))


def cmd_mle_train(args) -> None:
    cfg = args.cfg
    corpus = annotate_corpus(_pairs(args), cfg.costs(), _read_tags(args.external), cfg.jobs)
    model = mle_train(corpus, cfg.granularity, _modeled(args, corpus))
    _emit(_need(cfg.model, "--model"), model.dumps())


def cmd_mle_apply(args) -> None:
    cfg = args.cfg
    model = MleModel.loads(_read_text(_need(cfg.model, "--model")))
    sentences = read_sentences(_need(cfg.src, "--src"))
    labels: list[GedRecord | None] = [None] * len(sentences)
    if args.ged:
        records = read_ged(args.ged)
        if len(records) != len(sentences):
            raise FormatError(f"{len(records)} GED records for {len(sentences)} sentences")
        labels = list(records)
    out = [mle_apply(model, s, lab) for s, lab in zip(sentences, labels)]
    _emit(cfg.out, write_sentences(out))


def cmd_m2_score(args) -> None:
    cfg = args.cfg
    gold = read_m2(_need(cfg.gold, "--gold"))
    hyps = read_sentences(_need(cfg.hyp, "--hyp"), allow_empty=True)
    srcs = read_sentences(_need(cfg.src, "--src"))
    score = m2_score(
        [s.words for s in srcs],
        [h.words for h in hyps],
        gold,
        beta=cfg.beta,
        max_unchanged=cfg.max_unchanged,
        timeout=cfg.timeout,
        lower=not args.case_sensitive,
        jobs=cfg.jobs,
    )
    if score.timeouts:
        log.warning("%d of %d sentence(s) hit the time limit", score.timeouts, score.sentences)
    _emit(cfg.out, gec_report(score, args.format, args.name))


def cmd_ged_score(args) -> None:
    cfg = args.cfg
    gold = [project_record(r, cfg.granularity) for r in read_ged(_need(cfg.gold, "--gold"))]
    pred = [project_record(r, cfg.granularity) for r in read_ged(_need(args.pred, "--pred"))]
    _emit(cfg.out, ged_report(ged_score(gold, pred, cfg.beta), args.format))


def cmd_stats(args) -> None:
    cfg = args.cfg
    corpus = annotate_corpus(_pairs(args), cfg.costs(), _read_tags(args.external), cfg.jobs)
    granularities = [args.granularity] if args.granularity else [43, 13, 2]
    lines = []
    for g in granularities:
        dist = error_distribution(corpus, g)
        lines.append(f"# granularity\t{g}")
        lines.append(f"# edits\t{dist.total}")
        lines.append(f"# punctuation_share\t{dist.punctuation_share:.4f}")
        lines.append("label\tcount\tpercent")
        lines.extend(f"{lab}\t{c}\t{p:.2f}" for lab, c, p in dist.rows())
        lines.append("")
    _emit(cfg.out, "\n".join(lines) + "\n" if lines else "")


# -- parser --------------------------------------------------------------------

def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--jobs", type=int, help="worker processes (output order is unchanged)")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--out", help="output file (default: standard output)")

    costs = ArgumentParser(add_help=False)
    costs.add_argument("--sub-cost", type=float)
    costs.add_argument("--indel-cost", type=float)
    costs.add_argument("--confusion-cost", type=float)
    costs.add_argument("--diacritic-cost", type=float)
    costs.add_argument("--token-indel-extra", type=float)

    parallel = ArgumentParser(add_help=False)
    parallel.add_argument("--src", help="erroneous sentences, one per line")
    parallel.add_argument("--tgt", help="corrected sentences, one per line")

    labels = ArgumentParser(add_help=False)
    labels.add_argument("--external", help="tag file, one line of tags per sentence")
    labels.add_argument("--threshold", type=int, help="minimum count (exclusive) for a modeled label")
    labels.add_argument("--modeled", help="file listing modeled labels, overrides --threshold")

    parser = ArgumentParser(prog="arabgec", description="Arabic grammatical error correction toolkit.")
    parser.add_argument("--version", action="version", version=_version_text())
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("align", parents=[common, costs, parallel], help="extract token edits")
    p.add_argument("--m2", help="also write an M2 file of the edits")
    p.add_argument("--gold-links", help="gold links, one 's-t' line per sentence; report P/R/AER")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("annotate", parents=[common, costs, parallel, labels], help="typed edits as M2")
    p.add_argument("--out-tags", help="tag file for the edits")
    p.add_argument("--out-ged", help="token-level GED labels")
    p.add_argument("--out-modeled", help="list of modeled labels")
    p.add_argument("--granularity", type=int, choices=(43, 13, 2))
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("project", parents=[common], help="convert GED labels to a coarser granularity")
    p.add_argument("--ged", help="GED TSV input")
    p.add_argument("--granularity", type=int, choices=(43, 13, 2))
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("preprocess", parents=[common], help="apply detected merges and deletions")
    p.add_argument("--src")
    p.add_argument("--ged", help="predicted GED labels for --src")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("mle-train", parents=[common, costs, parallel, labels], help="train the MLE corrector")
    p.add_argument("--model")
    p.add_argument("--granularity", type=int, choices=(43, 13, 2))
    p.set_defaults(func=cmd_mle_train)

    p = sub.add_parser("mle-apply", parents=[common], help="correct text with an MLE model")
    p.add_argument("--model")
    p.add_argument("--src")
    p.add_argument("--ged", help="GED labels for --src")
    p.set_defaults(func=cmd_mle_apply)

    p = sub.add_parser("m2-score", parents=[common], help="score corrections against M2 gold")
    p.add_argument("--gold")
    p.add_argument("--hyp")
    p.add_argument("--src")
    p.add_argument("--beta", type=float)
    p.add_argument("--max-unchanged", type=int)
    p.add_argument("--timeout-secs", type=float, dest="timeout")
    p.add_argument("--case-sensitive", action="store_true")
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--name", default="", help="system name for TSV output")
    p.set_defaults(func=cmd_m2_score)

    p = sub.add_parser("ged-score", parents=[common], help="macro P/R/F for GED labels")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--granularity", type=int, choices=(43, 13, 2))
    p.add_argument("--beta", type=float)
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.set_defaults(func=cmd_ged_score)

    p = sub.add_parser("stats", parents=[common, costs, parallel], help="error type distribution")
    p.add_argument("--external", help="tag file, one line of tags per sentence")
    p.add_argument("--granularity", type=int, choices=(43, 13, 2), help="default: all three")
    p.set_defaults(func=cmd_stats)
    return parser


_CONFIG_FLAGS = (
    "sub_cost", "indel_cost", "confusion_cost", "diacritic_cost", "token_indel_extra",
    "threshold", "timeout", "granularity", "max_unchanged", "beta", "jobs",
    "src", "tgt", "gold", "hyp", "out", "model",
)


def _resolve_config(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    # stats defaults to every granularity; the config value only applies when given
    overrides = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
    if args.command == "stats":
        overrides.pop("granularity")
    return cfg.updated(**overrides)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        force=True,
    )
    try:
        args.cfg = _resolve_config(args)
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        log.error("%s", exc)
        return EXIT_INVALID
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
