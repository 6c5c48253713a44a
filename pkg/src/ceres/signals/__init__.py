"""Stage 3: per-region stress signals and the composite stress score."""

from ceres.signals.baselines import BaselineStats, BaselineTable, load_baselines
from ceres.signals.composite import CompositeResult, CssWeights, composite_stress
from ceres.signals.extract import (
    conflict_stress,
    drought_stress,
    extract_signals,
    food_access_stress,
    ipc_stress,
    price_stress,
    vegetation_stress,
)

__all__ = [
    "BaselineStats",
    "BaselineTable",
    "CompositeResult",
    "CssWeights",
    "composite_stress",
    "conflict_stress",
    "drought_stress",
    "extract_signals",
    "food_access_stress",
    "ipc_stress",
    "load_baselines",
    "price_stress",
    "vegetation_stress",
]
