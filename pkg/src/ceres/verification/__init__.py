"""T+90 grading and the verification metric suite."""

from ceres.verification.grading import (
    GRADING_WINDOW_DAYS,
    GradeRecord,
    GradeStatus,
    Outcome,
    grade_hypothesis,
    horizon_of,
    load_ipc_reports,
    select_report,
)
from ceres.verification.metrics import (
    AucResult,
    BaselineKind,
    CoverageRule,
    MetricStatus,
    PrecisionRecall,
    ReliabilityBin,
    auc,
    baseline_forecast,
    brier_score,
    brier_skill_score,
    discrete_crps,
    interval_coverage,
    interval_covers,
    mean_brier,
    mean_crps,
    metrics_snapshot,
    reliability_bins,
    reliability_diagram,
    tier_precision_recall,
)

__all__ = [
    "AucResult",
    "BaselineKind",
    "CoverageRule",
    "GRADING_WINDOW_DAYS",
    "GradeRecord",
    "GradeStatus",
    "MetricStatus",
    "Outcome",
    "PrecisionRecall",
    "ReliabilityBin",
    "auc",
    "baseline_forecast",
    "brier_score",
    "brier_skill_score",
    "discrete_crps",
    "grade_hypothesis",
    "horizon_of",
    "interval_coverage",
    "interval_covers",
    "load_ipc_reports",
    "mean_brier",
    "mean_crps",
    "metrics_snapshot",
    "reliability_bins",
    "reliability_diagram",
    "select_report",
    "tier_precision_recall",
]
