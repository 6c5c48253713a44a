"""Canonical JSON encoding and hypothesis (de)serialization.

Hypothesis ids and ledger hashes are digests of these bytes, so the encoding
is fixed: explicit key order, floats at six decimals with round-half-even,
no insignificant whitespace, UTF-8.
"""

from __future__ import annotations

import hashlib
import json
import math
import numbers
from datetime import date, datetime, timezone
from decimal import ROUND_FLOOR, ROUND_HALF_EVEN, Decimal
from enum import Enum
from typing import Any, Dict, Mapping

from ceres.core.types import (
    AlertTier,
    ConvergenceLevel,
    DriverCluster,
    DriverType,
    EvidenceItem,
    FalsificationPlan,
    FamineHypothesis,
    ProbabilityVector,
    SourceId,
)

FLOAT_QUANTUM = Decimal("0.000001")
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

# Fields excluded from the digest that mints the hypothesis id.
ID_EXCLUDED_KEYS = ("hypothesis_id", "created_at")


def format_float(value: float) -> str:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"Non-finite float cannot be serialized canonically: {value!r}")
    text = str(Decimal(repr(float(value))).quantize(FLOAT_QUANTUM, rounding=ROUND_HALF_EVEN))
    if text == "-0.000000":
        return "0.000000"
    return text


def quantize(value: float) -> float:
    """Round to the six serialized decimals."""
    return float(format_float(value))


def quantize_down(value: float) -> float:
    return float(Decimal(repr(float(value))).quantize(FLOAT_QUANTUM, rounding=ROUND_FLOOR))


def format_timestamp(value: datetime) -> str:
    if value.tzinfo is None:
        raise ValueError("Timestamps must be timezone-aware UTC")
    return value.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(value: str) -> datetime:
    return datetime.strptime(value, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def canonical_dumps(obj: Any) -> str:
    """Serialize ``obj`` canonically. Mapping keys keep their insertion order."""
    parts: list[str] = []
    _encode(obj, parts)
    return "".join(parts)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def sha256_hex(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def _encode(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, Enum):
        _encode(obj.value, parts)
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, numbers.Integral):
        parts.append(str(int(obj)))
    elif isinstance(obj, numbers.Real):
        parts.append(format_float(obj))
    elif isinstance(obj, datetime):
        parts.append(json.dumps(format_timestamp(obj)))
    elif isinstance(obj, date):
        parts.append(json.dumps(obj.isoformat()))
    elif isinstance(obj, Mapping):
        parts.append("{")
        for index, (key, value) in enumerate(obj.items()):
            if index:
                parts.append(",")
            parts.append(json.dumps(str(key), ensure_ascii=False))
            parts.append(":")
            _encode(value, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for index, value in enumerate(obj):
            if index:
                parts.append(",")
            _encode(value, parts)
        parts.append("]")
    else:
        raise TypeError(f"Cannot canonically serialize {type(obj).__name__}")


def hypothesis_to_dict(hypothesis: FamineHypothesis) -> Dict[str, Any]:
    probability = hypothesis.famine_probability
    payload: Dict[str, Any] = {
        "hypothesis_id": hypothesis.hypothesis_id,
        "region_id": hypothesis.region_id,
        "region_name": hypothesis.region_name,
        "reference_date": hypothesis.reference_date.isoformat(),
        "forecast_horizon_days": hypothesis.forecast_horizon_days,
        "alert_tier": hypothesis.alert_tier.value,
        "composite_stress_score": hypothesis.composite_stress_score,
        "famine_probability": {
            "p_ipc3plus_90d": probability.p3,
            "p_ipc4plus_90d": probability.p4,
            "p_famine_90d": probability.p5,
            "sensitivity_interval_low": probability.interval_low,
            "sensitivity_interval_high": probability.interval_high,
            "interval_type": probability.interval_type,
            "ci_method": probability.ci_method,
        },
        "driver_clusters": [
            {
                "driver_type": cluster.driver_type.value,
                "intensity": cluster.intensity,
                "confidence": cluster.confidence,
            }
            for cluster in hypothesis.driver_clusters
        ],
        "ipc_phase_forecast": int(hypothesis.ipc_phase_forecast),
        "created_at": format_timestamp(hypothesis.created_at),
        "evidence": [
            {
                "source_id": item.source_id.value,
                "available": item.available,
                "reference_week": item.reference_week.isoformat(),
                "attribution": item.attribution,
            }
            for item in hypothesis.evidence
        ],
        "notes": list(hypothesis.notes),
        "convergence_tier": hypothesis.convergence_tier.value,
        "low_coverage": hypothesis.low_coverage,
        "coverage_factor": hypothesis.coverage_factor,
        "falsification_plan": None,
    }
    plan = hypothesis.falsification_plan
    if plan is not None:
        payload["falsification_plan"] = {
            "horizon_date": plan.horizon_date.isoformat(),
            "test": plan.test,
            "auto_evaluate_at": plan.auto_evaluate_at.isoformat(),
        }
    return payload


def hypothesis_from_dict(data: Mapping[str, Any]) -> FamineHypothesis:
    probability = data["famine_probability"]
    plan_data = data.get("falsification_plan")
    plan = None
    if plan_data:
        plan = FalsificationPlan(
            horizon_date=date.fromisoformat(plan_data["horizon_date"]),
            test=plan_data["test"],
            auto_evaluate_at=date.fromisoformat(plan_data["auto_evaluate_at"]),
        )
    return FamineHypothesis(
        hypothesis_id=data["hypothesis_id"],
        region_id=data["region_id"],
        region_name=data["region_name"],
        reference_date=date.fromisoformat(data["reference_date"]),
        forecast_horizon_days=int(data["forecast_horizon_days"]),
        alert_tier=AlertTier(data["alert_tier"]),
        composite_stress_score=float(data["composite_stress_score"]),
        famine_probability=ProbabilityVector(
            p3=float(probability["p_ipc3plus_90d"]),
            p4=float(probability["p_ipc4plus_90d"]),
            p5=float(probability["p_famine_90d"]),
            interval_low=float(probability["sensitivity_interval_low"]),
            interval_high=float(probability["sensitivity_interval_high"]),
            interval_type=probability["interval_type"],
            ci_method=probability["ci_method"],
        ),
        driver_clusters=tuple(
            DriverCluster(
                driver_type=DriverType(item["driver_type"]),
                intensity=float(item["intensity"]),
                confidence=float(item["confidence"]),
            )
            for item in data.get("driver_clusters", [])
        ),
        ipc_phase_forecast=int(data["ipc_phase_forecast"]),
        created_at=parse_timestamp(data["created_at"]),
        evidence=tuple(
            EvidenceItem(
                source_id=SourceId(item["source_id"]),
                available=bool(item["available"]),
                reference_week=date.fromisoformat(item["reference_week"]),
                attribution=item["attribution"],
            )
            for item in data.get("evidence", [])
        ),
        notes=tuple(data.get("notes", [])),
        convergence_tier=ConvergenceLevel(data.get("convergence_tier", "NONE")),
        low_coverage=bool(data.get("low_coverage", False)),
        coverage_factor=float(data.get("coverage_factor", 1.0)),
        falsification_plan=plan,
    )


def dumps_hypothesis(hypothesis: FamineHypothesis) -> str:
    return canonical_dumps(hypothesis_to_dict(hypothesis))


def loads_hypothesis(text: str) -> FamineHypothesis:
    return hypothesis_from_dict(json.loads(text))


def id_payload(hypothesis: FamineHypothesis) -> str:
    """Canonical hypothesis body without the id and issue timestamp."""
    payload = hypothesis_to_dict(hypothesis)
    for key in ID_EXCLUDED_KEYS:
        payload.pop(key, None)
    return canonical_dumps(payload)


__all__ = [
    "canonical_bytes",
    "canonical_dumps",
    "dumps_hypothesis",
    "format_float",
    "format_timestamp",
    "hypothesis_from_dict",
    "hypothesis_to_dict",
    "id_payload",
    "loads_hypothesis",
    "parse_timestamp",
    "quantize",
    "quantize_down",
    "sha256_hex",
]
