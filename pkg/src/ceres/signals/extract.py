"""Stress extractors mapping raw weekly observations into [0, 1] scores."""

from __future__ import annotations

import logging
import math
from datetime import date
from typing import Callable, Dict, Mapping, Optional

from ceres.core.errors import SignalUnavailableError
from ceres.core.types import IpcPhase, Signal, SignalSet, clamp_unit
from ceres.ingestion.frames import Variable
from ceres.signals.baselines import BaselineStats, BaselineTable

LOGGER = logging.getLogger(__name__)

Z_SATURATION = 3.0
CONFLICT_EVENT_WEIGHT = 0.6
CONFLICT_FATALITY_WEIGHT = 0.4
FCS_ACCEPTABLE = 35.0
FCS_POOR = 14.0
RCSI_CAP = 42.0
PRICE_SATURATION = 1.0


def _anomaly_stress(z: float) -> float:
    if z is None or not math.isfinite(z):
        raise SignalUnavailableError(f"anomaly z-score must be finite, got {z!r}")
    return clamp_unit(max(0.0, -z) / Z_SATURATION)


def drought_stress(precip_z: float) -> float:
    """Deficit-only ramp saturating at z = -3."""
    return _anomaly_stress(precip_z)


def vegetation_stress(ndvi_z: float) -> float:
    return _anomaly_stress(ndvi_z)


def conflict_stress(
    events: float,
    fatalities: float,
    events_baseline: Optional[BaselineStats],
    fatalities_baseline: Optional[BaselineStats],
) -> float:
    if events_baseline is None or fatalities_baseline is None:
        raise SignalUnavailableError("conflict baseline missing")
    if events_baseline.p95 <= 0 or fatalities_baseline.p95 <= 0:
        raise SignalUnavailableError("conflict baseline p95 must be positive")
    return CONFLICT_EVENT_WEIGHT * clamp_unit(events / events_baseline.p95) + CONFLICT_FATALITY_WEIGHT * clamp_unit(
        fatalities / fatalities_baseline.p95
    )


def ipc_stress(phase: int) -> float:
    return (IpcPhase(phase) - 1) / 4.0


def food_access_stress(fcs: Optional[float], rcsi: Optional[float]) -> float:
    """Unweighted mean of the available FCS and rCSI components."""
    components = []
    if fcs is not None:
        components.append(clamp_unit((FCS_ACCEPTABLE - fcs) / (FCS_ACCEPTABLE - FCS_POOR)))
    if rcsi is not None:
        components.append(clamp_unit(rcsi / RCSI_CAP))
    if not components:
        raise SignalUnavailableError("neither FCS nor rCSI observed")
    return sum(components) / len(components)


def price_stress(index: float, baseline_mean: Optional[float]) -> float:
    if baseline_mean is None or baseline_mean <= 0:
        raise SignalUnavailableError("price baseline missing")
    return clamp_unit((index / baseline_mean - 1.0) / PRICE_SATURATION)


def extract_signals(
    region: str,
    week: date,
    observations: Mapping[str, Optional[float]],
    baselines: BaselineTable,
) -> SignalSet:
    """Build the region-week SignalSet and the stress-oriented pillar z-scores.

    A signal that cannot be computed is left absent; the reason is logged.
    """
    scores: Dict[Signal, float] = {}
    pillar_z: Dict[Signal, float] = {}

    def attempt(signal: Signal, compute: Callable[[], float]) -> None:
        try:
            scores[signal] = compute()
        except SignalUnavailableError as exc:
            LOGGER.info(
                "Signal %s unavailable: %s",
                signal.value,
                exc,
                extra={"stage": "signals", "region": region},
            )

    def value(variable: Variable) -> Optional[float]:
        raw = observations.get(variable.value)
        return None if raw is None else float(raw)

    def baseline(variable: Variable) -> Optional[BaselineStats]:
        return baselines.get(region, variable.value)

    precip_z = value(Variable.PRECIP_Z)
    if precip_z is not None:
        attempt(Signal.DROUGHT, lambda: drought_stress(precip_z))
        pillar_z[Signal.DROUGHT] = -precip_z

    ndvi_z = value(Variable.NDVI_Z)
    if ndvi_z is not None:
        attempt(Signal.VEGETATION, lambda: vegetation_stress(ndvi_z))
        pillar_z[Signal.VEGETATION] = -ndvi_z

    events = value(Variable.CONFLICT_EVENTS)
    fatalities = value(Variable.CONFLICT_FATALITIES)
    if events is not None:
        attempt(
            Signal.CONFLICT,
            lambda: conflict_stress(
                events,
                fatalities or 0.0,
                baseline(Variable.CONFLICT_EVENTS),
                baseline(Variable.CONFLICT_FATALITIES),
            ),
        )
        _store_z(pillar_z, Signal.CONFLICT, baseline(Variable.CONFLICT_EVENTS), events)

    phase_value = value(Variable.IPC_PHASE)
    phase = int(round(phase_value)) if phase_value is not None else None
    if phase is not None:
        attempt(Signal.IPC, lambda: ipc_stress(phase))
        _store_z(pillar_z, Signal.IPC, baseline(Variable.IPC_PHASE), float(phase))

    fcs = value(Variable.FCS)
    rcsi = value(Variable.RCSI)
    if fcs is not None or rcsi is not None:
        attempt(Signal.FOOD_ACCESS, lambda: food_access_stress(fcs, rcsi))
        if fcs is not None:
            fcs_baseline = baseline(Variable.FCS)
            if fcs_baseline is not None and fcs_baseline.std > 0:
                # Deficit orientation: lower FCS means more stress.
                pillar_z[Signal.FOOD_ACCESS] = (fcs_baseline.mean - fcs) / fcs_baseline.std
        else:
            _store_z(pillar_z, Signal.FOOD_ACCESS, baseline(Variable.RCSI), rcsi)

    index = value(Variable.PRICE_INDEX)
    if index is not None:
        price_baseline = baseline(Variable.PRICE_INDEX)
        attempt(Signal.PRICE, lambda: price_stress(index, price_baseline.mean if price_baseline else None))
        _store_z(pillar_z, Signal.PRICE, price_baseline, index)

    return SignalSet(
        region=region,
        week=week,
        drought=scores.get(Signal.DROUGHT),
        vegetation=scores.get(Signal.VEGETATION),
        conflict=scores.get(Signal.CONFLICT),
        ipc=scores.get(Signal.IPC),
        food_access=scores.get(Signal.FOOD_ACCESS),
        price=scores.get(Signal.PRICE),
        ipc_phase=phase if Signal.IPC in scores else None,
        pillar_z={signal: z for signal, z in pillar_z.items() if signal in scores},
    )


def _store_z(
    pillar_z: Dict[Signal, float],
    signal: Signal,
    stats: Optional[BaselineStats],
    raw: Optional[float],
) -> None:
    if stats is None or raw is None or stats.std <= 0:
        return
    pillar_z[signal] = stats.z(raw)


__all__ = [
    "conflict_stress",
    "drought_stress",
    "extract_signals",
    "food_access_stress",
    "ipc_stress",
    "price_stress",
    "vegetation_stress",
]
