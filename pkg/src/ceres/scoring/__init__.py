"""Logistic famine-risk model and coefficient stability analysis."""

from ceres.scoring.model import (
    DEFAULT_COEFFICIENTS,
    CoefficientTable,
    CoefficientVector,
    MonotonicityBounds,
    PhaseProbabilities,
    apply_monotonicity,
    load_coefficients,
    score_region,
    sigmoid,
)
from ceres.scoring.stability import StabilityConfig, StabilityResult, coefficient_stability

__all__ = [
    "DEFAULT_COEFFICIENTS",
    "CoefficientTable",
    "CoefficientVector",
    "MonotonicityBounds",
    "PhaseProbabilities",
    "StabilityConfig",
    "StabilityResult",
    "apply_monotonicity",
    "coefficient_stability",
    "load_coefficients",
    "score_region",
    "sigmoid",
]
