"""Tier stability under simultaneous +/- fractional coefficient perturbation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, FrozenSet, Optional

import numpy as np

from ceres.core.types import AlertTier, FeatureVector
from ceres.scoring.model import (
    DEFAULT_COEFFICIENTS,
    CoefficientTable,
    MonotonicityBounds,
    PhaseProbabilities,
    apply_monotonicity,
    design_row,
    score_region,
    sigmoid,
)

TierClassifier = Callable[[PhaseProbabilities], AlertTier]


@dataclass(frozen=True)
class StabilityConfig:
    fraction: float = 0.20
    draws: int = 100

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction < 1.0:
            raise ValueError("stability fraction must be within [0, 1)")
        if self.draws < 1:
            raise ValueError("stability draws must be >= 1")


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    baseline_tier: AlertTier
    tiers_seen: FrozenSet[AlertTier]
    draws: int


def coefficient_stability(
    features: FeatureVector,
    classify: TierClassifier,
    *,
    table: CoefficientTable = DEFAULT_COEFFICIENTS,
    bounds: MonotonicityBounds = MonotonicityBounds(),
    config: StabilityConfig = StabilityConfig(),
    seed: int = 0,
    baseline: Optional[PhaseProbabilities] = None,
) -> StabilityResult:
    """Rescore under independent Uniform(1 - f, 1 + f) multipliers on every coefficient.

    ``classify`` maps capped probabilities to a tier with the region's
    convergence tier and CSS already bound, so only the model output moves.
    ``baseline`` is what the published tier is classified on; it defaults to
    the unrounded capped scores.
    """
    baseline_tier = classify(baseline if baseline is not None else score_region(features, table, bounds))
    rng = np.random.default_rng(seed)
    base = table.matrix()
    row = design_row(features)
    factors = rng.uniform(1.0 - config.fraction, 1.0 + config.fraction, size=(config.draws,) + base.shape)

    tiers = {baseline_tier}
    for draw in factors:
        logits = (base * draw) @ row
        raw = PhaseProbabilities(*(float(value) for value in sigmoid(logits)))
        tiers.add(classify(apply_monotonicity(raw, bounds)))
    return StabilityResult(
        stable=tiers == {baseline_tier},
        baseline_tier=baseline_tier,
        tiers_seen=frozenset(tiers),
        draws=config.draws,
    )


__all__ = ["StabilityConfig", "StabilityResult", "TierClassifier", "coefficient_stability"]
