"""
Pydantic response schemas for the public REST surface.

Hypothesis models mirror the canonical JSON layout key for key, so every
response body is validated against the published hypothesis schema.
"""
from __future__ import annotations

from datetime import date
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class FamineProbabilityOut(BaseModel):
    p_ipc3plus_90d: float = Field(ge=0.0, le=1.0)
    p_ipc4plus_90d: float = Field(ge=0.0, le=1.0)
    p_famine_90d: float = Field(ge=0.0, le=1.0)
    sensitivity_interval_low: float = Field(ge=0.0, le=1.0)
    sensitivity_interval_high: float = Field(ge=0.0, le=1.0)
    interval_type: str
    ci_method: str


class DriverClusterOut(BaseModel):
    driver_type: str
    intensity: float = Field(ge=0.0, le=1.0)
    confidence: float = Field(ge=0.0, le=1.0)


class EvidenceOut(BaseModel):
    source_id: str
    available: bool
    reference_week: date
    attribution: str


class FalsificationPlanOut(BaseModel):
    horizon_date: date
    test: str
    auto_evaluate_at: date


class HypothesisOut(BaseModel):
    """One FamineHypothesis in its canonical layout."""

    model_config = ConfigDict(extra="forbid")

    hypothesis_id: str = Field(pattern=r"^CERES-HYP-[A-Z]{3}-\d{8}-[0-9A-F]{6}$")
    region_id: str = Field(pattern=r"^[A-Z]{3}$")
    region_name: str
    reference_date: date
    forecast_horizon_days: int
    alert_tier: Literal["TIER-1", "TIER-2", "TIER-3", "NONE"]
    composite_stress_score: float = Field(ge=0.0, le=1.0)
    famine_probability: FamineProbabilityOut
    driver_clusters: List[DriverClusterOut]
    ipc_phase_forecast: int = Field(ge=1, le=5)
    created_at: str
    evidence: List[EvidenceOut]
    notes: List[str]
    convergence_tier: Literal["NONE", "WATCH", "WARNING", "CRITICAL"]
    low_coverage: bool
    coverage_factor: float = Field(ge=0.0, le=1.0)
    falsification_plan: Optional[FalsificationPlanOut] = None


class ArchiveLatestOut(BaseModel):
    run_id: str
    run_date: date
    run_ts: str
    config_version: Optional[str] = None
    hypotheses: List[HypothesisOut]


class SnapshotOut(BaseModel):
    run_id: str
    run_ts: str
    region_id: str
    reference_date: date
    p_ipc3plus_90d: float
    p_ipc4plus_90d: float
    p_famine_90d: float
    sensitivity_interval_low: float
    sensitivity_interval_high: float
    alert_tier: str
    top_drivers: List[str]
    coverage_factor: float
    low_coverage: bool
    hypothesis_id: str


class RegionHistoryOut(BaseModel):
    region_id: str
    limit: int
    snapshots: List[SnapshotOut]


class ArchiveStatsOut(BaseModel):
    runs: int = Field(ge=0)
    snapshots: int = Field(ge=0)
    regions: int = Field(ge=0)
    first_run_ts: Optional[str] = None
    last_run_ts: Optional[str] = None
    latest_run_id: Optional[str] = None
    latest_tier_counts: Dict[str, int]
    latest_low_coverage: int = Field(ge=0)


class GradeOut(BaseModel):
    sequence: int = Field(ge=1)
    hypothesis_id: str
    region: str
    reference_date: date
    alert_tier: str
    forecast: Dict[str, float]
    outcome: Dict[str, Any]
    brier3: Optional[float] = None
    status: Literal["graded", "ungradable"]
    graded_at: str
    prev_hash: str
    entry_hash: str


class GradesPageOut(BaseModel):
    grades: List[GradeOut]
    next_cursor: Optional[int] = None


class MetricOut(BaseModel):
    value: Any = None
    n: int
    minimum_n: Optional[int] = None
    status: Literal["ok", "provisional", "insufficient-n", "undefined"]


class MetricsOut(BaseModel):
    summary_version: str
    generated_ts: str
    n_records: int
    n_graded: int
    n_ungradable: int
    coverage_rule: Literal["literal", "side"]
    metrics: Dict[str, MetricOut]


class LedgerStatusOut(BaseModel):
    valid: bool
    first_bad_sequence: Optional[int] = None
    entries: int
    reason: str = ""


class HealthOut(BaseModel):
    status: Literal["ok", "no-runs-yet", "degraded"]
    last_run_id: Optional[str] = None
    last_run_ts: Optional[str] = None
    ledgers: Dict[str, LedgerStatusOut]


class ApiErrorOut(BaseModel):
    status: int
    code: str
    message: str
