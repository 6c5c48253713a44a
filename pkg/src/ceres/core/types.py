"""Shared dataclasses and enums used across ingestion, scoring, hypotheses, and verification."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Collection, Dict, List, Optional, Tuple

ISO3_PATTERN = re.compile(r"^[A-Z]{3}$")
HYPOTHESIS_ID_PATTERN = re.compile(r"^CERES-HYP-[A-Z]{3}-\d{8}-[0-9A-F]{6}$")

EPSILON = 1e-12
FORECAST_HORIZON_DAYS = 90
INTERVAL_TYPE = "input_perturbation_90pct"
# Legacy value kept for API continuity.
CI_METHOD = "expert_prior_logistic_perturbation_v2"
DEFAULT_P4_CAP_RATIO = 0.70
DEFAULT_P5_CAP_RATIO = 0.45
MAX_FLAGGED = 6
STABILITY_NOTE = "tier-unstable-under-coefficient-perturbation"
LOW_COVERAGE_NOTE = "low-coverage-widened-perturbation"


class RegionId(str):
    """Uppercase ISO3 country code."""

    def __new__(cls, value: str) -> "RegionId":
        if not isinstance(value, str) or not ISO3_PATTERN.match(value):
            raise ValueError(f"Region id must be three uppercase letters, got {value!r}")
        return super().__new__(cls, value)

    @classmethod
    def within(cls, value: str, monitoring: Collection[str]) -> "RegionId":
        region = cls(value)
        if region not in monitoring:
            raise ValueError(f"Region {region} is not in the monitoring set")
        return region


class IpcPhase(int):
    """IPC severity phase, 1 (minimal) through 5 (famine)."""

    def __new__(cls, value: int) -> "IpcPhase":
        if isinstance(value, bool) or int(value) != value or not 1 <= int(value) <= 5:
            raise ValueError(f"IPC phase must be an integer 1..5, got {value!r}")
        return super().__new__(cls, int(value))


def stress_score(value: float, name: str = "stress") -> float:
    """Validate a [0, 1] stress value and return it as a float."""
    number = float(value)
    if math.isnan(number) or not 0.0 <= number <= 1.0:
        raise ValueError(f"{name} must be within [0, 1], got {value!r}")
    return number


def clamp_unit(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


def is_monday(day: date) -> bool:
    return day.weekday() == 0


class SourceId(str, Enum):
    CHIRPS = "CHIRPS"
    MODIS_NDVI = "MODIS_NDVI"
    ACLED = "ACLED"
    IPC = "IPC"
    WFP_FCS = "WFP_FCS"
    PRICE_INDEX = "PRICE_INDEX"


class Signal(str, Enum):
    """The six stress pillars. Declaration order fixes the availability bit positions."""

    DROUGHT = "drought"
    VEGETATION = "vegetation"
    CONFLICT = "conflict"
    IPC = "ipc"
    FOOD_ACCESS = "food_access"
    PRICE = "price"

    @property
    def bit(self) -> int:
        return 1 << list(Signal).index(self)


SIGNAL_SOURCES: Dict[Signal, SourceId] = {
    Signal.DROUGHT: SourceId.CHIRPS,
    Signal.VEGETATION: SourceId.MODIS_NDVI,
    Signal.CONFLICT: SourceId.ACLED,
    Signal.IPC: SourceId.IPC,
    Signal.FOOD_ACCESS: SourceId.WFP_FCS,
    Signal.PRICE: SourceId.PRICE_INDEX,
}


class AlertTier(str, Enum):
    TIER_1 = "TIER-1"
    TIER_2 = "TIER-2"
    TIER_3 = "TIER-3"
    NONE = "NONE"

    @property
    def rank(self) -> int:
        return list(AlertTier).index(self)


class ConvergenceLevel(str, Enum):
    NONE = "NONE"
    WATCH = "WATCH"
    WARNING = "WARNING"
    CRITICAL = "CRITICAL"

    @property
    def score(self) -> float:
        return CONVERGENCE_SCORES[self]


CONVERGENCE_SCORES: Dict[ConvergenceLevel, float] = {
    ConvergenceLevel.NONE: 0.0,
    ConvergenceLevel.WATCH: 0.33,
    ConvergenceLevel.WARNING: 0.67,
    ConvergenceLevel.CRITICAL: 1.0,
}


class DriverType(str, Enum):
    CONFLICT = "CONFLICT"
    DROUGHT = "DROUGHT"
    VEGETATION = "VEGETATION"
    IPC_TREND = "IPC_TREND"
    FOOD_ACCESS = "FOOD_ACCESS"
    PRICE = "PRICE"


@dataclass(frozen=True)
class SignalSet:
    """Per-region, per-week stress scores. Absent scores clear their availability bit."""

    region: str
    week: date
    drought: Optional[float] = None
    vegetation: Optional[float] = None
    conflict: Optional[float] = None
    ipc: Optional[float] = None
    food_access: Optional[float] = None
    price: Optional[float] = None
    ipc_phase: Optional[int] = None
    pillar_z: Dict[Signal, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        RegionId(self.region)
        if not is_monday(self.week):
            raise ValueError(f"SignalSet week {self.week} is not a Monday")
        for signal in Signal:
            value = getattr(self, signal.value)
            if value is not None:
                stress_score(value, f"{signal.value}_stress")
        if self.ipc_phase is not None:
            IpcPhase(self.ipc_phase)

    def score(self, signal: Signal) -> Optional[float]:
        return getattr(self, signal.value)

    def available(self) -> Tuple[Signal, ...]:
        return tuple(signal for signal in Signal if self.score(signal) is not None)

    @property
    def availability(self) -> int:
        mask = 0
        for signal in self.available():
            mask |= signal.bit
        return mask


FEATURE_NAMES: Tuple[str, ...] = (
    "composite_stress",
    "ipc_stress",
    "conflict_stress",
    "drought_stress",
    "food_access_stress",
    "price_stress",
    "convergence_score",
    "n_independent_flagged",
)


@dataclass(frozen=True)
class FeatureVector:
    composite_stress: float
    ipc_stress: float = 0.0
    conflict_stress: float = 0.0
    drought_stress: float = 0.0
    food_access_stress: float = 0.0
    price_stress: float = 0.0
    convergence_score: float = 0.0
    n_independent_flagged: int = 0
    low_coverage: bool = False

    def __post_init__(self) -> None:
        for name in FEATURE_NAMES[:6]:
            stress_score(getattr(self, name), name)
        if not any(abs(self.convergence_score - score) < EPSILON for score in CONVERGENCE_SCORES.values()):
            raise ValueError(f"convergence_score must be one of 0.0/0.33/0.67/1.0, got {self.convergence_score!r}")
        if int(self.n_independent_flagged) != self.n_independent_flagged or not 0 <= self.n_independent_flagged <= MAX_FLAGGED:
            raise ValueError(f"n_independent_flagged must be an integer 0..6, got {self.n_independent_flagged!r}")

    def values(self) -> Tuple[float, ...]:
        """Model inputs in the coefficient-table order."""
        return tuple(float(getattr(self, name)) for name in FEATURE_NAMES)


@dataclass(frozen=True)
class ProbabilityVector:
    p3: float
    p4: float
    p5: float
    interval_low: float
    interval_high: float
    interval_type: str = INTERVAL_TYPE
    ci_method: str = CI_METHOD

    def monotonicity_violations(
        self,
        p4_cap_ratio: float = DEFAULT_P4_CAP_RATIO,
        p5_cap_ratio: float = DEFAULT_P5_CAP_RATIO,
    ) -> List[str]:
        violations: List[str] = []
        if self.p4 > p4_cap_ratio * self.p3 + EPSILON:
            violations.append(f"p4 > {p4_cap_ratio:.2f}·p3")
        if self.p5 > p5_cap_ratio * self.p4 + EPSILON:
            violations.append(f"p5 > {p5_cap_ratio:.2f}·p4")
        return violations


@dataclass(frozen=True)
class DriverCluster:
    driver_type: DriverType
    intensity: float
    confidence: float


@dataclass(frozen=True)
class EvidenceItem:
    source_id: SourceId
    available: bool
    reference_week: date
    attribution: str


@dataclass(frozen=True)
class FalsificationPlan:
    horizon_date: date
    test: str
    auto_evaluate_at: date


@dataclass(frozen=True)
class FamineHypothesis:
    hypothesis_id: str
    region_id: str
    region_name: str
    reference_date: date
    alert_tier: AlertTier
    composite_stress_score: float
    famine_probability: ProbabilityVector
    driver_clusters: Tuple[DriverCluster, ...]
    ipc_phase_forecast: int
    created_at: datetime
    forecast_horizon_days: int = FORECAST_HORIZON_DAYS
    evidence: Tuple[EvidenceItem, ...] = ()
    notes: Tuple[str, ...] = ()
    convergence_tier: ConvergenceLevel = ConvergenceLevel.NONE
    low_coverage: bool = False
    coverage_factor: float = 1.0
    falsification_plan: Optional[FalsificationPlan] = None

    @property
    def p3(self) -> float:
        return self.famine_probability.p3

    @property
    def p4(self) -> float:
        return self.famine_probability.p4


def ranking_key(hypothesis: FamineHypothesis) -> Tuple[int, float, str]:
    """Tier first, then P(IPC4+) descending, then ISO3."""
    return (hypothesis.alert_tier.rank, -hypothesis.p4, hypothesis.region_id)


def rank_hypotheses(hypotheses: Collection[FamineHypothesis]) -> List[FamineHypothesis]:
    return sorted(hypotheses, key=ranking_key)


__all__ = [
    "AlertTier",
    "CI_METHOD",
    "CONVERGENCE_SCORES",
    "ConvergenceLevel",
    "DEFAULT_P4_CAP_RATIO",
    "DEFAULT_P5_CAP_RATIO",
    "DriverCluster",
    "DriverType",
    "EPSILON",
    "EvidenceItem",
    "FEATURE_NAMES",
    "FORECAST_HORIZON_DAYS",
    "FalsificationPlan",
    "FamineHypothesis",
    "FeatureVector",
    "HYPOTHESIS_ID_PATTERN",
    "INTERVAL_TYPE",
    "IpcPhase",
    "LOW_COVERAGE_NOTE",
    "ProbabilityVector",
    "RegionId",
    "SIGNAL_SOURCES",
    "STABILITY_NOTE",
    "Signal",
    "SignalSet",
    "SourceId",
    "clamp_unit",
    "is_monday",
    "rank_hypotheses",
    "ranking_key",
    "stress_score",
]
