"""Composite stress score (CSS) with coverage adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict

from ceres.core.errors import RegionSkipped
from ceres.core.types import Signal, SignalSet

LOW_COVERAGE_MIN_SIGNALS = 3


@dataclass(frozen=True)
class CssWeights:
    ipc: float = 0.25
    conflict: float = 0.20
    drought: float = 0.20
    food_access: float = 0.15
    vegetation: float = 0.10
    price: float = 0.10

    def __post_init__(self) -> None:
        values = [getattr(self, signal.value) for signal in Signal]
        if any(value < 0 for value in values):
            raise ValueError("CSS weights must be non-negative")
        if not math.isclose(math.fsum(values), 1.0, rel_tol=0.0, abs_tol=1e-12):
            raise ValueError(f"CSS weights must sum to 1.0, got {math.fsum(values)!r}")

    def weight(self, signal: Signal) -> float:
        return getattr(self, signal.value)

    @classmethod
    def from_mapping(cls, data: Dict[str, float]) -> "CssWeights":
        unknown = set(data) - {signal.value for signal in Signal}
        if unknown:
            raise ValueError(f"Unknown CSS weight keys: {', '.join(sorted(unknown))}")
        return cls(**{key: float(value) for key, value in data.items()})


@dataclass(frozen=True)
class CompositeResult:
    css: float
    coverage_factor: float
    low_coverage: bool
    n_available: int


def composite_stress(signals: SignalSet, weights: CssWeights = CssWeights()) -> CompositeResult:
    """Weighted mean over available signals, scaled by the available fraction."""
    available = signals.available()
    if not available:
        raise RegionSkipped(f"{signals.region}: no stress signals available for week {signals.week}")
    total_weight = math.fsum(weights.weight(signal) for signal in available)
    if total_weight <= 0:
        raise RegionSkipped(f"{signals.region}: available signals carry zero CSS weight")
    weighted = math.fsum(weights.weight(signal) * signals.score(signal) for signal in available)
    coverage_factor = len(available) / len(Signal)
    css = min(1.0, max(0.0, weighted / total_weight * coverage_factor))
    return CompositeResult(
        css=css,
        coverage_factor=coverage_factor,
        low_coverage=len(available) < LOW_COVERAGE_MIN_SIGNALS,
        n_available=len(available),
    )


__all__ = ["CompositeResult", "CssWeights", "LOW_COVERAGE_MIN_SIGNALS", "composite_stress"]
