from .ged import GedScore, ged_score
from .m2 import GecScore, m2_score
from .report import alignment_report, gec_report, ged_report

__all__ = [
    "GecScore", "GedScore", "alignment_report", "gec_report", "ged_report", "ged_score", "m2_score",
]
