"""Input-perturbation sensitivity intervals on P(IPC3+)."""

from ceres.uncertainty.intervals import (
    PerturbationConfig,
    SensitivityInterval,
    derive_seed,
    quantile,
    sensitivity_interval,
)

__all__ = [
    "PerturbationConfig",
    "SensitivityInterval",
    "derive_seed",
    "quantile",
    "sensitivity_interval",
]
