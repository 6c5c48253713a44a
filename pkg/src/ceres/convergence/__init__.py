"""Stage 4: multi-pillar convergence detection."""

from ceres.convergence.detect import (
    CORRELATED_PAIRS,
    PILLAR_Z_THRESHOLD,
    ConvergenceTier,
    PillarFlags,
    classify_convergence,
    effective_count,
    flag_pillars,
)

__all__ = [
    "CORRELATED_PAIRS",
    "ConvergenceTier",
    "PILLAR_Z_THRESHOLD",
    "PillarFlags",
    "classify_convergence",
    "effective_count",
    "flag_pillars",
]
