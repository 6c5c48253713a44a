"""Pillar flags, correlated-pair discount, and convergence tiers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from ceres.core.types import CONVERGENCE_SCORES, ConvergenceLevel, Signal

PILLAR_Z_THRESHOLD = 1.5
# A jointly flagged correlated pair counts 1.3 instead of 2.0.
PAIR_DISCOUNT = 0.7
CORRELATED_PAIRS: Tuple[Tuple[Signal, Signal], ...] = (
    (Signal.DROUGHT, Signal.VEGETATION),
    (Signal.IPC, Signal.FOOD_ACCESS),
)

_TIER_THRESHOLDS: Tuple[Tuple[float, ConvergenceLevel], ...] = (
    (3.0, ConvergenceLevel.CRITICAL),
    (2.0, ConvergenceLevel.WARNING),
    (1.0, ConvergenceLevel.WATCH),
)


@dataclass(frozen=True)
class PillarFlags:
    flagged: FrozenSet[Signal]

    @property
    def raw_count(self) -> int:
        return len(self.flagged)

    @property
    def effective_count(self) -> float:
        return effective_count(self)


@dataclass(frozen=True)
class ConvergenceTier:
    tier: ConvergenceLevel
    effective_count: float
    raw_count: int

    @property
    def score(self) -> float:
        return CONVERGENCE_SCORES[self.tier]


def flag_pillars(z_scores: Mapping[Signal, Optional[float]]) -> PillarFlags:
    """Flag pillars with z strictly above 1.5; absent or non-finite z never flags."""
    flagged = frozenset(
        signal
        for signal, z in z_scores.items()
        if z is not None and math.isfinite(z) and z > PILLAR_Z_THRESHOLD
    )
    return PillarFlags(flagged=flagged)


def effective_count(flags: PillarFlags) -> float:
    count = float(flags.raw_count)
    for first, second in CORRELATED_PAIRS:
        if first in flags.flagged and second in flags.flagged:
            count -= PAIR_DISCOUNT
    return round(count, 10)


def classify_convergence(flags: PillarFlags) -> ConvergenceTier:
    """Tiers follow the discounted count: a correlated pair alone stays at WATCH."""
    effective = effective_count(flags)
    tier = ConvergenceLevel.NONE
    for threshold, level in _TIER_THRESHOLDS:
        if effective >= threshold:
            tier = level
            break
    return ConvergenceTier(tier=tier, effective_count=effective, raw_count=flags.raw_count)


def flags_by_signal(flags: PillarFlags) -> Dict[str, bool]:
    return {signal.value: signal in flags.flagged for signal in Signal}


__all__ = [
    "CORRELATED_PAIRS",
    "ConvergenceTier",
    "PAIR_DISCOUNT",
    "PILLAR_Z_THRESHOLD",
    "PillarFlags",
    "classify_convergence",
    "effective_count",
    "flag_pillars",
    "flags_by_signal",
]
