"""Verification metric suite over graded records.

All metrics read GradeRecords; ungradable records never enter a denominator
but are counted in the snapshot so exclusions stay visible.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from datetime import date, timedelta
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm, rankdata

from ceres.core.errors import CrpsDataError, MetricUndefinedError
from ceres.core.types import EPSILON, AlertTier, IpcPhase
from ceres.verification.grading import GradeRecord

LOGGER = logging.getLogger(__name__)

CLIMATOLOGY_P3 = 0.65
UNINFORMATIVE_P3 = 0.5
RELIABILITY_BINS = 10
RECALL_LOOKBACK_DAYS = 90
AUC_CONFIDENCE = 0.95

MINIMUM_N: Dict[str, int] = {
    "brier": 100,
    "brier_skill_score": 100,
    "tier1_precision": 30,
    "tier1_recall": 10,
    "interval_coverage": 200,
    "crps": 500,
    "reliability": 500,
}


class BaselineKind(str, Enum):
    PERSISTENCE = "persistence"
    CLIMATOLOGY = "climatology"
    UNINFORMATIVE = "uninformative"


class CoverageRule(str, Enum):
    """How a binary outcome counts as inside a probability interval."""

    LITERAL = "literal"
    SIDE = "side"


class MetricStatus(str, Enum):
    OK = "ok"
    PROVISIONAL = "provisional"
    INSUFFICIENT_N = "insufficient-n"
    UNDEFINED = "undefined"


def baseline_forecast(kind: BaselineKind, phase_at_reference: Optional[int] = None) -> float:
    if kind is BaselineKind.CLIMATOLOGY:
        return CLIMATOLOGY_P3
    if kind is BaselineKind.UNINFORMATIVE:
        return UNINFORMATIVE_P3
    if phase_at_reference is None:
        raise ValueError("persistence baseline needs the phase at the reference date")
    return (int(IpcPhase(phase_at_reference)) - 1) / 4.0


def graded(records: Iterable[GradeRecord]) -> List[GradeRecord]:
    return [record for record in records if record.gradable]


def brier_score(forecasts: Sequence[float], outcomes: Sequence[int]) -> float:
    """Mean squared error of binary probability forecasts."""
    p = np.asarray(forecasts, dtype=float)
    o = np.asarray(outcomes, dtype=float)
    if p.size == 0:
        raise MetricUndefinedError("Brier score needs at least one forecast")
    if p.shape != o.shape:
        raise ValueError("forecasts and outcomes must have the same length")
    return float(np.mean((p - o) ** 2))


def mean_brier(records: Iterable[GradeRecord]) -> float:
    scores = [record.brier3 for record in graded(records)]
    if not scores:
        raise MetricUndefinedError("mean Brier needs at least one graded record")
    return math.fsum(scores) / len(scores)


def brier_skill_score(model_bs: float, baseline_bs: float) -> float:
    if baseline_bs <= 0.0:
        raise MetricUndefinedError("Brier skill score is undefined for a zero baseline")
    return 1.0 - model_bs / baseline_bs


def discrete_crps(probabilities: Any, observed_phase: int) -> float:
    """Ranked probability score over the IPC cut-points (<=2, 3, 4).

    ``probabilities`` is anything with ``p3``, ``p4`` and ``p5`` attributes.
    """
    phase = int(IpcPhase(observed_phase))
    p3, p4, p5 = float(probabilities.p3), float(probabilities.p4), float(probabilities.p5)
    pmf = (1.0 - p3, p3 - p4, p4 - p5, p5)
    if any(cell < -EPSILON for cell in pmf):
        raise CrpsDataError(f"phase pmf has a negative cell: {pmf}")
    cumulative = (1.0 - p3, 1.0 - p4, 1.0 - p5)
    cut_points = (2, 3, 4)
    return math.fsum(
        (forecast - float(phase <= cut)) ** 2 for forecast, cut in zip(cumulative, cut_points)
    )


def mean_crps(records: Iterable[GradeRecord]) -> float:
    scores = [discrete_crps(record, record.outcome.observed_phase) for record in graded(records)]
    if not scores:
        raise MetricUndefinedError("CRPS needs at least one graded record")
    return math.fsum(scores) / len(scores)


@dataclass(frozen=True)
class ReliabilityBin:
    bin_mid: float
    mean_forecast: Optional[float]
    empirical_freq: Optional[float]
    count: int


def reliability_bins(
    forecasts: Sequence[float],
    outcomes: Sequence[int],
    bins: int = RELIABILITY_BINS,
) -> List[ReliabilityBin]:
    """Equal-width bins over [0, 1]; the last bin is closed at 1.0. Empty bins are kept."""
    p = np.asarray(forecasts, dtype=float)
    o = np.asarray(outcomes, dtype=float)
    if p.size == 0:
        raise MetricUndefinedError("reliability diagram needs at least one forecast")
    index = np.minimum((p * bins).astype(int), bins - 1)
    rows: List[ReliabilityBin] = []
    for slot in range(bins):
        mask = index == slot
        count = int(mask.sum())
        mid = round((slot + 0.5) / bins, 10)
        if count == 0:
            rows.append(ReliabilityBin(mid, None, None, 0))
            continue
        rows.append(ReliabilityBin(mid, float(p[mask].mean()), float(o[mask].mean()), count))
    return rows


def reliability_diagram(records: Iterable[GradeRecord], bins: int = RELIABILITY_BINS) -> List[ReliabilityBin]:
    rows = graded(records)
    return reliability_bins([r.p3 for r in rows], [r.outcome.o3 for r in rows], bins)


@dataclass(frozen=True)
class PrecisionRecall:
    precision: Optional[float]
    recall: Optional[float]
    tier1_issued: int
    tier1_verified: int
    events: int
    events_caught: int


IssuedAlert = Tuple[str, date, AlertTier]


def tier_precision_recall(
    records: Iterable[GradeRecord],
    issued: Optional[Iterable[IssuedAlert]] = None,
    *,
    lookback_days: int = RECALL_LOOKBACK_DAYS,
) -> PrecisionRecall:
    """TIER-1 precision over graded records and Phase 4+ event recall.

    An event is a distinct (region, report_date) with observed phase >= 4; it is
    caught when any TIER-1 for that region was issued in the ``lookback_days``
    before the report. ``issued`` defaults to the records' own alerts.
    """
    rows = graded(records)
    tier1 = [r for r in rows if r.alert_tier is AlertTier.TIER_1]
    verified = sum(1 for r in tier1 if r.outcome.o4 == 1)
    precision = verified / len(tier1) if tier1 else None

    alerts = list(issued) if issued is not None else [(r.region, r.reference_date, r.alert_tier) for r in rows]
    tier1_dates: Dict[str, List[date]] = {}
    for region, reference, tier in alerts:
        if tier is AlertTier.TIER_1:
            tier1_dates.setdefault(region, []).append(reference)

    events = sorted({(r.region, r.outcome.report_date) for r in rows if r.outcome.o4 == 1})
    window = timedelta(days=lookback_days)
    caught = sum(
        1
        for region, report_date in events
        if any(report_date - window <= issued_on < report_date for issued_on in tier1_dates.get(region, ()))
    )
    recall = caught / len(events) if events else None
    return PrecisionRecall(
        precision=precision,
        recall=recall,
        tier1_issued=len(tier1),
        tier1_verified=verified,
        events=len(events),
        events_caught=caught,
    )


def interval_covers(low: float, high: float, outcome: int, rule: CoverageRule = CoverageRule.LITERAL) -> bool:
    if rule is CoverageRule.LITERAL:
        return low <= outcome <= high
    # Side rule: the band sits on the observed side of 0.5 or straddles it.
    if outcome == 1:
        return high >= 0.5
    return low <= 0.5


def interval_coverage(records: Iterable[GradeRecord], rule: CoverageRule = CoverageRule.LITERAL) -> float:
    rows = graded(records)
    if not rows:
        raise MetricUndefinedError("interval coverage needs at least one graded record")
    covered = sum(interval_covers(r.interval_low, r.interval_high, r.outcome.o3, rule) for r in rows)
    return covered / len(rows)


@dataclass(frozen=True)
class AucResult:
    auc: float
    ci_low: float
    ci_high: float
    n_positive: int
    n_negative: int


def auc(scores: Sequence[float], labels: Sequence[int], confidence: float = AUC_CONFIDENCE) -> AucResult:
    """Rank-based ROC AUC with a Hanley-McNeil confidence interval clipped to [0, 1]."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise MetricUndefinedError("AUC needs both positive and negative labels")
    ranks = rankdata(s, method="average")
    area = (float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    q1 = area / (2.0 - area)
    q2 = 2.0 * area * area / (1.0 + area)
    variance = (
        area * (1.0 - area) + (n_pos - 1) * (q1 - area * area) + (n_neg - 1) * (q2 - area * area)
    ) / (n_pos * n_neg)
    half_width = float(norm.ppf(0.5 + confidence / 2.0)) * math.sqrt(max(variance, 0.0))
    return AucResult(
        auc=area,
        ci_low=max(0.0, area - half_width),
        ci_high=min(1.0, area + half_width),
        n_positive=n_pos,
        n_negative=n_neg,
    )


@dataclass(frozen=True)
class MetricValue:
    value: Any
    n: int
    minimum_n: Optional[int]
    status: MetricStatus

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "n": self.n,
            "minimum_n": self.minimum_n,
            "status": self.status.value,
        }


def _gate(name: str, n: int, compute) -> MetricValue:
    minimum = MINIMUM_N.get(name)
    try:
        value = compute()
    except MetricUndefinedError as exc:
        LOGGER.debug("%s undefined: %s", name, exc)
        # A sample below its minimum is insufficient whether or not it yields a value.
        below = minimum is not None and n < minimum
        return MetricValue(None, n, minimum, MetricStatus.INSUFFICIENT_N if below else MetricStatus.UNDEFINED)
    if minimum is None or n >= minimum:
        status = MetricStatus.OK
    elif name == "brier":
        status = MetricStatus.PROVISIONAL
    else:
        status = MetricStatus.INSUFFICIENT_N
    return MetricValue(value, n, minimum, status)


def metrics_snapshot(
    records: Sequence[GradeRecord],
    *,
    issued: Optional[Iterable[IssuedAlert]] = None,
    coverage_rule: CoverageRule = CoverageRule.LITERAL,
) -> Dict[str, Any]:
    """Every metric with its sample size and minimum-N status; nothing is omitted."""
    rows = graded(records)
    n = len(rows)
    pr = tier_precision_recall(rows, issued)

    def bss() -> float:
        if not rows:
            raise MetricUndefinedError("no graded records")
        climatology = brier_score([CLIMATOLOGY_P3] * n, [r.outcome.o3 for r in rows])
        return brier_skill_score(mean_brier(rows), climatology)

    def precision() -> float:
        if pr.precision is None:
            raise MetricUndefinedError("no TIER-1 issued")
        return pr.precision

    def recall() -> float:
        if pr.recall is None:
            raise MetricUndefinedError("no Phase 4+ events")
        return pr.recall

    def roc() -> Dict[str, Any]:
        return asdict(auc([r.p3 for r in rows], [r.outcome.o3 for r in rows]))

    metrics = {
        "brier": _gate("brier", n, lambda: mean_brier(rows)),
        "brier_skill_score": _gate("brier_skill_score", n, bss),
        "crps": _gate("crps", n, lambda: mean_crps(rows)),
        "reliability": _gate("reliability", n, lambda: [asdict(b) for b in reliability_diagram(rows)]),
        "tier1_precision": _gate("tier1_precision", pr.tier1_issued, precision),
        "tier1_recall": _gate("tier1_recall", pr.events, recall),
        "interval_coverage": _gate("interval_coverage", n, lambda: interval_coverage(rows, coverage_rule)),
        "auc": _gate("auc", n, roc),
    }
    return {
        "n_records": len(records),
        "n_graded": n,
        "n_ungradable": len(records) - n,
        "coverage_rule": coverage_rule.value,
        "metrics": {name: value.to_dict() for name, value in metrics.items()},
    }


__all__ = [
    "AucResult",
    "BaselineKind",
    "CLIMATOLOGY_P3",
    "CoverageRule",
    "IssuedAlert",
    "MINIMUM_N",
    "MetricStatus",
    "MetricValue",
    "PrecisionRecall",
    "ReliabilityBin",
    "UNINFORMATIVE_P3",
    "auc",
    "baseline_forecast",
    "brier_score",
    "brier_skill_score",
    "discrete_crps",
    "interval_coverage",
    "interval_covers",
    "mean_brier",
    "mean_crps",
    "metrics_snapshot",
    "reliability_bins",
    "reliability_diagram",
    "tier_precision_recall",
]
