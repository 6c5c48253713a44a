"""Stage 6: tiers, ids, drivers and hypothesis assembly."""

from ceres.hypothesis.builder import (
    build_hypothesis,
    evidence_items,
    falsification_plan,
    finalize_probabilities,
    ipc_phase_forecast,
    issue_timestamp,
)
from ceres.hypothesis.drivers import DriverConfidence, decompose_drivers
from ceres.hypothesis.identity import mint_hypothesis_id
from ceres.hypothesis.tiers import DEFAULT_TIER_RULES, TierRules, classify_tier

__all__ = [
    "DEFAULT_TIER_RULES",
    "DriverConfidence",
    "TierRules",
    "build_hypothesis",
    "classify_tier",
    "decompose_drivers",
    "evidence_items",
    "falsification_plan",
    "finalize_probabilities",
    "ipc_phase_forecast",
    "issue_timestamp",
    "mint_hypothesis_id",
]
