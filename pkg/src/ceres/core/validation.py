"""Report-based invariant checks for assembled hypotheses."""

from __future__ import annotations

import math
import re
from datetime import timedelta
from typing import Collection, List, Optional

from ceres.core.types import (
    CI_METHOD,
    DEFAULT_P4_CAP_RATIO,
    DEFAULT_P5_CAP_RATIO,
    FORECAST_HORIZON_DAYS,
    HYPOTHESIS_ID_PATTERN,
    INTERVAL_TYPE,
    ISO3_PATTERN,
    AlertTier,
    FamineHypothesis,
)

_LOOSE_ID_PATTERN = re.compile(r"^CERES-HYP-([A-Za-z]{3})-(\d{8})-([0-9A-Fa-f]{6})$")


def validate_hypothesis(
    hypothesis: FamineHypothesis,
    *,
    p4_cap_ratio: float = DEFAULT_P4_CAP_RATIO,
    p5_cap_ratio: float = DEFAULT_P5_CAP_RATIO,
    monitoring: Optional[Collection[str]] = None,
) -> List[str]:
    """Return every invariant violation found; an empty list means valid."""
    violations: List[str] = []
    violations.extend(_check_id(hypothesis))

    if not ISO3_PATTERN.match(hypothesis.region_id or ""):
        violations.append(f"region_id {hypothesis.region_id!r} is not an uppercase ISO3 code")
    elif monitoring is not None and hypothesis.region_id not in monitoring:
        violations.append(f"region_id {hypothesis.region_id} is not in the monitoring set")
    if not hypothesis.region_name:
        violations.append("region_name is empty")
    if hypothesis.forecast_horizon_days != FORECAST_HORIZON_DAYS:
        violations.append(f"forecast_horizon_days must be {FORECAST_HORIZON_DAYS}")
    if not isinstance(hypothesis.alert_tier, AlertTier):
        violations.append(f"alert_tier {hypothesis.alert_tier!r} is not a known tier")
    if not _unit(hypothesis.composite_stress_score):
        violations.append("composite_stress_score outside [0, 1]")
    if not 1 <= int(hypothesis.ipc_phase_forecast) <= 5:
        violations.append("ipc_phase_forecast outside 1..5")

    probability = hypothesis.famine_probability
    for name in ("p3", "p4", "p5", "interval_low", "interval_high"):
        if not _unit(getattr(probability, name)):
            violations.append(f"{name} outside [0, 1]")
    violations.extend(probability.monotonicity_violations(p4_cap_ratio, p5_cap_ratio))
    if not probability.interval_low <= probability.p3 <= probability.interval_high:
        violations.append("sensitivity interval does not contain p3")
    if probability.interval_type != INTERVAL_TYPE:
        violations.append(f"interval_type must be {INTERVAL_TYPE!r}")
    if probability.ci_method != CI_METHOD:
        violations.append(f"ci_method must be {CI_METHOD!r}")

    for cluster in hypothesis.driver_clusters:
        if not (_unit(cluster.intensity) and _unit(cluster.confidence)):
            violations.append(f"driver {cluster.driver_type.value} intensity/confidence outside [0, 1]")
    for item in hypothesis.evidence:
        if item.available and not item.attribution.strip():
            violations.append(f"evidence {item.source_id.value} is available but has no attribution")

    created = hypothesis.created_at
    if created.tzinfo is None or created.utcoffset() != timedelta(0):
        violations.append("created_at must be a UTC timestamp")

    plan = hypothesis.falsification_plan
    if plan is not None:
        expected = hypothesis.reference_date + timedelta(days=FORECAST_HORIZON_DAYS)
        if plan.horizon_date != expected or plan.auto_evaluate_at != expected:
            violations.append("falsification horizon must be reference_date + 90 days")
    if not 0.0 <= hypothesis.coverage_factor <= 1.0:
        violations.append("coverage_factor outside [0, 1]")
    return violations


def _check_id(hypothesis: FamineHypothesis) -> List[str]:
    identifier = hypothesis.hypothesis_id or ""
    if HYPOTHESIS_ID_PATTERN.match(identifier):
        violations = []
        iso3, stamp = identifier.split("-")[2:4]
        if iso3 != hypothesis.region_id:
            violations.append("hypothesis_id ISO3 does not match region_id")
        if stamp != hypothesis.reference_date.strftime("%Y%m%d"):
            violations.append("hypothesis_id date does not match reference_date")
        return violations
    loose = _LOOSE_ID_PATTERN.match(identifier)
    if loose is None:
        return [f"hypothesis_id {identifier!r} does not match CERES-HYP-XXX-YYYYMMDD-HHHHHH"]
    violations = []
    if not loose.group(1).isupper():
        violations.append("lowercase ISO3 in hypothesis_id")
    if not loose.group(3).isupper() and any(ch.isalpha() for ch in loose.group(3)):
        violations.append("lowercase hex digest in hypothesis_id")
    return violations


def _unit(value: float) -> bool:
    return not math.isnan(value) and 0.0 <= value <= 1.0


__all__ = ["validate_hypothesis"]
