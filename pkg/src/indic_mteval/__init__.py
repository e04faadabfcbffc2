"""Human-rating processing and metric evaluation for English/Hindi to Indian-language MT."""

from indic_mteval.core import (
    FoldedSegment,
    LanguagePair,
    Origin,
    QualityClass,
    RatingRecord,
    ValidationError,
    segment_key,
)
from indic_mteval.correlate import CorrelationReport, correlate, kendall_tau
from indic_mteval.normalize import ScaleAnchors, apply_minmax, compute_anchors, fold, zscore_by_rater
from indic_mteval.qcstats import filter_ratings, rater_verdicts

__version__ = "0.1.0"

__all__ = [
    "CorrelationReport",
    "FoldedSegment",
    "LanguagePair",
    "Origin",
    "QualityClass",
    "RatingRecord",
    "ScaleAnchors",
    "ValidationError",
    "apply_minmax",
    "compute_anchors",
    "correlate",
    "filter_ratings",
    "fold",
    "kendall_tau",
    "rater_verdicts",
    "segment_key",
    "zscore_by_rater",
]
