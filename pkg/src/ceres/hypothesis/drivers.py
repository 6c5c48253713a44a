"""Driver cluster decomposition of a region-week SignalSet."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping

from ceres.core.types import DriverCluster, DriverType, Signal, SignalSet

TOP_DRIVERS = 3

DRIVER_TYPES: Dict[Signal, DriverType] = {
    Signal.DROUGHT: DriverType.DROUGHT,
    Signal.VEGETATION: DriverType.VEGETATION,
    Signal.CONFLICT: DriverType.CONFLICT,
    Signal.IPC: DriverType.IPC_TREND,
    Signal.FOOD_ACCESS: DriverType.FOOD_ACCESS,
    Signal.PRICE: DriverType.PRICE,
}


@dataclass(frozen=True)
class DriverConfidence:
    """Fixed provenance-quality constants per source class."""

    ipc: float = 0.95
    conflict: float = 0.91
    survey: float = 0.82
    remote_sensing: float = 0.85
    price: float = 0.80

    def __post_init__(self) -> None:
        for name in ("ipc", "conflict", "survey", "remote_sensing", "price"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"driver confidence '{name}' must be within [0, 1]")

    def for_signal(self, signal: Signal) -> float:
        return {
            Signal.DROUGHT: self.remote_sensing,
            Signal.VEGETATION: self.remote_sensing,
            Signal.CONFLICT: self.conflict,
            Signal.IPC: self.ipc,
            Signal.FOOD_ACCESS: self.survey,
            Signal.PRICE: self.price,
        }[signal]

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> "DriverConfidence":
        return cls(**{key: float(value) for key, value in data.items()})


def decompose_drivers(
    signals: SignalSet,
    confidence: DriverConfidence = DriverConfidence(),
    top: int = TOP_DRIVERS,
) -> List[DriverCluster]:
    """One cluster per available signal, strongest first; ties keep pillar order."""
    clusters = [
        DriverCluster(
            driver_type=DRIVER_TYPES[signal],
            intensity=float(signals.score(signal)),
            confidence=confidence.for_signal(signal),
        )
        for signal in signals.available()
    ]
    clusters.sort(key=lambda cluster: cluster.intensity, reverse=True)
    return clusters[:top]


__all__ = ["DRIVER_TYPES", "DriverConfidence", "TOP_DRIVERS", "decompose_drivers"]
