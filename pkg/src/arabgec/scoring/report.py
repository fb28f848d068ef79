"""Plain-text and TSV rendering of score reports."""

from __future__ import annotations

from ..align import AlignmentScore
from .ged import GedScore
from .m2 import GecScore

NO_PROPOSAL_NOTE = "precision is 1.0 when no edits are proposed"


def _pct(x) -> str:
    return f"{100 * float(x):.2f}"


def gec_report(score: GecScore, fmt: str = "text", name: str = "") -> str:
    choices = ",".join(f"{a}:{n}" for a, n in score.annotator_choices)
    if fmt == "tsv":
        header = "name\tP\tR\tF1\tF0.5\tcorrect\tproposed\tgold\tsentences\ttimeouts\tannotators"
        row = "\t".join([
            name or "-", _pct(score.precision), _pct(score.recall), _pct(score.f1),
            _pct(score.f05), str(score.correct), str(score.proposed), str(score.gold),
            str(score.sentences), str(score.timeouts), choices or "-",
        ])
        return header + "\n" + row + "\n"
    warn = "  (WARNING: sentences scored as unchanged)" if score.timeouts else ""
    rows = [
        ("Precision", f"{float(score.precision):.4f}"),
        ("Recall", f"{float(score.recall):.4f}"),
        (f"F{float(score.beta):g}", f"{float(score.f):.4f}"),
        ("F1", f"{float(score.f1):.4f}"),
        ("correct", str(score.correct)),
        ("proposed", str(score.proposed)),
        ("gold", str(score.gold)),
        ("sentences", str(score.sentences)),
        ("timeouts", f"{score.timeouts}{warn}"),
        ("annotators", choices or "-"),
        ("note", NO_PROPOSAL_NOTE),
    ]
    return "".join(f"{k:<11}: {v}\n" for k, v in rows)


def ged_report(score: GedScore, fmt: str = "text") -> str:
    if fmt == "tsv":
        rows = [f"label\tP\tR\tF{score.beta:g}\ttp\tfp\tfn"]
        for c in score.per_class:
            rows.append(f"{c.label}\t{_pct(c.precision)}\t{_pct(c.recall)}\t{_pct(c.f)}\t{c.tp}\t{c.fp}\t{c.fn}")
        rows.append(f"#macro\t{_pct(score.precision)}\t{_pct(score.recall)}\t{_pct(score.f)}\t-\t-\t-")
        rows.append(f"#accuracy\t{_pct(score.accuracy)}")
        return "\n".join(rows) + "\n"
    width = max([len(c.label) for c in score.per_class] + [5])
    lines = [f"{'label':<{width}}  {'P':>6}  {'R':>6}  {'F' + format(score.beta, 'g'):>6}"]
    for c in score.per_class:
        lines.append(f"{c.label:<{width}}  {_pct(c.precision):>6}  {_pct(c.recall):>6}  {_pct(c.f):>6}")
    lines.append(f"{'macro':<{width}}  {_pct(score.precision):>6}  {_pct(score.recall):>6}  {_pct(score.f):>6}")
    lines.append(f"accuracy: {_pct(score.accuracy)}  tokens: {score.tokens}")
    return "\n".join(lines) + "\n"


def alignment_report(score: AlignmentScore, fmt: str = "text") -> str:
    if fmt == "tsv":
        return f"P\tR\tAER\n{_pct(score.precision)}\t{_pct(score.recall)}\t{score.aer:.4f}\n"
    return f"P: {_pct(score.precision)}  R: {_pct(score.recall)}  AER: {score.aer:.4f}\n"
