"""Alert tier rules, evaluated in strict TIER-1 -> TIER-2 -> TIER-3 order."""

from __future__ import annotations

from dataclasses import dataclass

from ceres.core.types import AlertTier, ConvergenceLevel


@dataclass(frozen=True)
class TierRules:
    tier1_p4: float = 0.50
    tier2_p3: float = 0.45
    tier3_css: float = 0.05

    def classify(self, p3: float, p4: float, convergence: ConvergenceLevel, css: float) -> AlertTier:
        if p4 >= self.tier1_p4 or convergence is ConvergenceLevel.CRITICAL:
            return AlertTier.TIER_1
        if p3 >= self.tier2_p3 or convergence is ConvergenceLevel.WARNING:
            return AlertTier.TIER_2
        if css > self.tier3_css:
            return AlertTier.TIER_3
        return AlertTier.NONE


DEFAULT_TIER_RULES = TierRules()


def classify_tier(
    p3: float,
    p4: float,
    convergence: ConvergenceLevel,
    css: float,
    rules: TierRules = DEFAULT_TIER_RULES,
) -> AlertTier:
    return rules.classify(p3, p4, convergence, css)


__all__ = ["DEFAULT_TIER_RULES", "TierRules", "classify_tier"]
