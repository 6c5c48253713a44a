"""Assembly of FamineHypothesis objects (Stage 6)."""

from __future__ import annotations

import logging
from dataclasses import replace
from datetime import date, datetime, time, timedelta, timezone
from typing import Iterable, List, Mapping, Optional, Sequence

from ceres.core.errors import HypothesisValidationError
from ceres.core.serialization import id_payload, quantize, quantize_down
from ceres.core.types import (
    FORECAST_HORIZON_DAYS,
    LOW_COVERAGE_NOTE,
    STABILITY_NOTE,
    AlertTier,
    ConvergenceLevel,
    DriverCluster,
    EvidenceItem,
    FalsificationPlan,
    FamineHypothesis,
    FeatureVector,
    ProbabilityVector,
    SourceId,
)
from ceres.core.validation import validate_hypothesis
from ceres.hypothesis.identity import mint_hypothesis_id
from ceres.scoring.model import MonotonicityBounds

LOGGER = logging.getLogger(__name__)

ISSUE_TIME = time(6, 0, 0)
GRADING_WINDOW_DAYS = 30
FALSIFICATION_TEST = (
    "latest IPC phase reported within +/-30 days of horizon_date >= 3 "
    "(>= 4 for TIER-1 claim audit)"
)


def issue_timestamp(reference_date: date) -> datetime:
    """Scheduled issue slot: the reference Monday at 06:00 UTC."""
    return datetime.combine(reference_date, ISSUE_TIME, tzinfo=timezone.utc)


def falsification_plan(reference_date: date) -> FalsificationPlan:
    horizon = reference_date + timedelta(days=FORECAST_HORIZON_DAYS)
    return FalsificationPlan(horizon_date=horizon, test=FALSIFICATION_TEST, auto_evaluate_at=horizon)


def ipc_phase_forecast(p3: float, p4: float, p5: float, current_phase: Optional[int]) -> int:
    """Threshold cascade; falls back to the current phase, or 1 when none is known."""
    if p5 >= 0.5:
        return 5
    if p4 >= 0.5:
        return 4
    if p3 >= 0.5:
        return 3
    return int(current_phase) if current_phase is not None else 1


def finalize_probabilities(
    probabilities: ProbabilityVector,
    bounds: MonotonicityBounds = MonotonicityBounds(),
) -> ProbabilityVector:
    """Round to the serialized precision without breaking the caps or interval order."""
    p3 = quantize(probabilities.p3)
    p4 = min(quantize(probabilities.p4), quantize_down(bounds.p4_cap_ratio * p3))
    p5 = min(quantize(probabilities.p5), quantize_down(bounds.p5_cap_ratio * p4))
    low = min(quantize(probabilities.interval_low), p3)
    high = max(quantize(probabilities.interval_high), p3)
    return ProbabilityVector(p3=p3, p4=p4, p5=p5, interval_low=low, interval_high=high)


def evidence_items(
    reference_week: date,
    latest_weeks: Mapping[SourceId, Optional[date]],
    attributions: Mapping[SourceId, str],
) -> List[EvidenceItem]:
    """One item per source, in source order; unavailable sources keep their flag."""
    items = []
    for source in SourceId:
        week = latest_weeks.get(source)
        items.append(
            EvidenceItem(
                source_id=source,
                available=week is not None,
                reference_week=week or reference_week,
                attribution=attributions.get(source, ""),
            )
        )
    return items


def build_hypothesis(
    *,
    region: str,
    region_name: str,
    reference_date: date,
    features: FeatureVector,
    probabilities: ProbabilityVector,
    tier: AlertTier,
    convergence: ConvergenceLevel,
    drivers: Sequence[DriverCluster],
    evidence: Iterable[EvidenceItem],
    stable: bool = True,
    coverage_factor: float = 1.0,
    current_phase: Optional[int] = None,
    bounds: MonotonicityBounds = MonotonicityBounds(),
    created_at: Optional[datetime] = None,
) -> FamineHypothesis:
    """Assemble, mint the id, and validate; invalid objects are rejected."""
    final = finalize_probabilities(probabilities, bounds)
    notes: List[str] = []
    if not stable:
        notes.append(STABILITY_NOTE)
    if features.low_coverage:
        notes.append(LOW_COVERAGE_NOTE)

    draft = FamineHypothesis(
        hypothesis_id="",
        region_id=region,
        region_name=region_name,
        reference_date=reference_date,
        alert_tier=tier,
        composite_stress_score=quantize(features.composite_stress),
        famine_probability=final,
        driver_clusters=tuple(
            DriverCluster(cluster.driver_type, quantize(cluster.intensity), quantize(cluster.confidence))
            for cluster in drivers
        ),
        ipc_phase_forecast=ipc_phase_forecast(final.p3, final.p4, final.p5, current_phase),
        created_at=created_at or issue_timestamp(reference_date),
        evidence=tuple(evidence),
        notes=tuple(notes),
        convergence_tier=convergence,
        low_coverage=features.low_coverage,
        coverage_factor=quantize(coverage_factor),
        falsification_plan=falsification_plan(reference_date),
    )
    hypothesis = replace(draft, hypothesis_id=mint_hypothesis_id(region, reference_date, id_payload(draft)))
    violations = validate_hypothesis(
        hypothesis, p4_cap_ratio=bounds.p4_cap_ratio, p5_cap_ratio=bounds.p5_cap_ratio
    )
    if violations:
        raise HypothesisValidationError(violations)
    LOGGER.debug(
        "Built %s tier=%s p3=%.3f p4=%.3f",
        hypothesis.hypothesis_id,
        tier.value,
        final.p3,
        final.p4,
        extra={"stage": "hypotheses", "region": region},
    )
    return hypothesis


__all__ = [
    "FALSIFICATION_TEST",
    "GRADING_WINDOW_DAYS",
    "build_hypothesis",
    "evidence_items",
    "falsification_plan",
    "finalize_probabilities",
    "ipc_phase_forecast",
    "issue_timestamp",
]
