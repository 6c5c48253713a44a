from __future__ import annotations

import itertools
from datetime import date, datetime, timedelta, timezone
from types import SimpleNamespace
from typing import List

import numpy as np
import pytest

from ceres.core.errors import CrpsDataError, EarlyGradingError, IngestError, MetricUndefinedError
from ceres.core.types import AlertTier
from ceres.verification.grading import (
    GradeRecord,
    GradeStatus,
    Outcome,
    grade_hypothesis,
    horizon_of,
    load_ipc_reports,
    select_report,
)
from ceres.verification.metrics import (
    MINIMUM_N,
    BaselineKind,
    CoverageRule,
    MetricStatus,
    auc,
    baseline_forecast,
    brier_score,
    brier_skill_score,
    discrete_crps,
    interval_covers,
    metrics_snapshot,
    reliability_bins,
    tier_precision_recall,
)
from tests.helpers import REFERENCE_MONDAY, make_hypothesis

HORIZON = REFERENCE_MONDAY + timedelta(days=90)
GRADED_AT = datetime(2026, 7, 15, tzinfo=timezone.utc)


def _record(
    p3: float,
    observed: int | None,
    *,
    region: str = "SOM",
    reference: date = REFERENCE_MONDAY,
    tier: AlertTier = AlertTier.TIER_2,
    interval: tuple[float, float] = (0.0, 1.0),
) -> GradeRecord:
    horizon = reference + timedelta(days=90)
    if observed is None:
        outcome = Outcome(region=region, horizon_date=horizon)
        status, brier = GradeStatus.UNGRADABLE, None
    else:
        outcome = Outcome(region=region, horizon_date=horizon, observed_phase=observed, report_date=horizon)
        status, brier = GradeStatus.GRADED, (p3 - outcome.o3) ** 2
    return GradeRecord(
        hypothesis_id=f"CERES-HYP-{region}-{reference:%Y%m%d}-ABCDEF",
        region=region,
        reference_date=reference,
        alert_tier=tier,
        p3=p3,
        p4=0.7 * p3,
        p5=0.3 * p3,
        interval_low=interval[0],
        interval_high=interval[1],
        outcome=outcome,
        brier3=brier,
        graded_at=GRADED_AT,
        status=status,
    )


def test_grading_before_horizon_is_refused() -> None:
    hypothesis = make_hypothesis()
    with pytest.raises(EarlyGradingError):
        grade_hypothesis(hypothesis, [(HORIZON, 4)], as_of=HORIZON - timedelta(days=1))


def test_grade_uses_latest_report_within_window() -> None:
    hypothesis = make_hypothesis(p3=0.8)
    reports = [
        (HORIZON - timedelta(days=31), 5),
        (HORIZON - timedelta(days=20), 2),
        (HORIZON + timedelta(days=10), 4),
        (HORIZON + timedelta(days=25), 1),
    ]
    record = grade_hypothesis(hypothesis, reports, as_of=HORIZON + timedelta(days=12), graded_at=GRADED_AT)
    assert record.status is GradeStatus.GRADED
    assert record.outcome.observed_phase == 4
    assert (record.outcome.o3, record.outcome.o4, record.outcome.o5) == (1, 1, 0)
    assert record.brier3 == pytest.approx(0.04)


def test_open_window_without_report_is_pending() -> None:
    hypothesis = make_hypothesis()
    assert grade_hypothesis(hypothesis, [], as_of=HORIZON + timedelta(days=30)) is None


def test_closed_window_without_report_is_ungradable() -> None:
    hypothesis = make_hypothesis()
    record = grade_hypothesis(hypothesis, [(HORIZON + timedelta(days=45), 4)], as_of=HORIZON + timedelta(days=31))
    assert record.status is GradeStatus.UNGRADABLE
    assert record.brier3 is None
    assert record.outcome.o3 is None


def test_select_report_ignores_reports_after_as_of() -> None:
    reports = [(HORIZON, 3), (HORIZON + timedelta(days=5), 4)]
    assert select_report(HORIZON, reports, as_of=HORIZON) == (HORIZON, 3)
    assert select_report(HORIZON, reports) == (HORIZON + timedelta(days=5), 4)


def test_grade_payload_survives_ledger_encoding() -> None:
    record = grade_hypothesis(make_hypothesis(), [(HORIZON, 3)], as_of=HORIZON, graded_at=GRADED_AT)
    assert GradeRecord.from_payload(record.to_payload()) == record
    assert horizon_of(make_hypothesis()) == HORIZON


def test_outcome_rejects_reports_outside_the_window() -> None:
    with pytest.raises(ValueError):
        Outcome(region="SOM", horizon_date=HORIZON, observed_phase=3, report_date=HORIZON + timedelta(days=31))


def test_load_ipc_reports_validates_phase() -> None:
    assert load_ipc_reports(['{"date": "2026-05-20", "phase": 4}', ""]) == [(date(2026, 5, 20), 4)]
    with pytest.raises(IngestError, match="malformed IPC report"):
        load_ipc_reports(['{"date": "2026-05-20", "phase": 7}'])


def test_baseline_forecasts() -> None:
    assert baseline_forecast(BaselineKind.PERSISTENCE, 4) == pytest.approx(0.75)
    assert baseline_forecast(BaselineKind.CLIMATOLOGY) == pytest.approx(0.65)
    assert baseline_forecast(BaselineKind.UNINFORMATIVE) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        baseline_forecast(BaselineKind.PERSISTENCE)


def test_brier_and_skill_scores() -> None:
    assert brier_score([1.0, 0.0], [1, 0]) == 0.0
    assert brier_score([0.5, 0.5], [1, 0]) == pytest.approx(0.25)
    assert brier_skill_score(0.1, 0.2) == pytest.approx(0.5)
    with pytest.raises(MetricUndefinedError):
        brier_score([], [])
    with pytest.raises(MetricUndefinedError):
        brier_skill_score(0.1, 0.0)


def test_discrete_crps_properties() -> None:
    perfect_low = SimpleNamespace(p3=0.0, p4=0.0, p5=0.0)
    perfect_famine = SimpleNamespace(p3=1.0, p4=1.0, p5=1.0)
    assert discrete_crps(perfect_low, 1) == 0.0
    assert discrete_crps(perfect_famine, 5) == 0.0
    assert discrete_crps(perfect_low, 5) == pytest.approx(3.0)

    forecast = SimpleNamespace(p3=0.8, p4=0.5, p5=0.2)
    scores = [discrete_crps(forecast, phase) for phase in range(1, 6)]
    assert all(score >= 0.0 for score in scores)
    # Phases 1 and 2 share a bucket.
    assert scores[0] == pytest.approx(scores[1])
    with pytest.raises(CrpsDataError):
        discrete_crps(SimpleNamespace(p3=0.3, p4=0.5, p5=0.1), 3)


def _random_phase_forecast(rng: np.random.Generator) -> SimpleNamespace:
    p3, p4, p5 = sorted(rng.uniform(size=3), reverse=True)
    return SimpleNamespace(p3=float(p3), p4=float(p4), p5=float(p5))


def test_discrete_crps_is_never_negative() -> None:
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        assert discrete_crps(_random_phase_forecast(rng), int(rng.integers(1, 6))) >= 0.0


@pytest.mark.parametrize("phase", [1, 2, 3, 4, 5])
def test_point_mass_on_the_observed_phase_scores_zero(phase: int) -> None:
    forecast = SimpleNamespace(p3=float(phase >= 3), p4=float(phase >= 4), p5=float(phase >= 5))
    assert discrete_crps(forecast, phase) == 0.0


def test_discrete_crps_reduces_to_brier_below_phase_four() -> None:
    # With P4 = P5 = 0 only the first cut point carries any error for phases 1-3.
    rng = np.random.default_rng(19)
    for _ in range(10_000):
        p3 = float(rng.uniform())
        phase = int(rng.integers(1, 4))
        forecast = SimpleNamespace(p3=p3, p4=0.0, p5=0.0)
        assert abs(discrete_crps(forecast, phase) - brier_score([p3], [int(phase >= 3)])) <= 1e-12
    # Phases 4 and 5 add one per cut point the zero P4/P5 misses.
    forecast = SimpleNamespace(p3=0.6, p4=0.0, p5=0.0)
    assert discrete_crps(forecast, 4) == pytest.approx(brier_score([0.6], [1]) + 1.0)
    assert discrete_crps(forecast, 5) == pytest.approx(brier_score([0.6], [1]) + 2.0)


def _brute_force_auc(scores: List[float], labels: List[int]) -> float:
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(positives, negatives))
    return wins / (len(positives) * len(negatives))


def test_auc_matches_pairwise_definition() -> None:
    rng = np.random.default_rng(4)
    scores = np.round(rng.uniform(size=60), 2).tolist()
    labels = rng.integers(0, 2, size=60).tolist()
    result = auc(scores, labels)
    assert result.auc == pytest.approx(_brute_force_auc(scores, labels))
    assert 0.0 <= result.ci_low <= result.auc <= result.ci_high <= 1.0


def test_auc_needs_both_classes() -> None:
    with pytest.raises(MetricUndefinedError):
        auc([0.2, 0.4], [1, 1])


def test_auc_matches_pair_counting_on_small_samples() -> None:
    rng = np.random.default_rng(23)
    for _ in range(1000):
        n = int(rng.integers(2, 21))
        labels = rng.integers(0, 2, size=n)
        labels[:2] = (1, 0)
        # One decimal place so ties are common.
        scores = np.round(rng.uniform(size=n), 1).tolist()
        result = auc(scores, labels.tolist())
        assert abs(result.auc - _brute_force_auc(scores, labels.tolist())) <= 1e-12
        assert 0.0 <= result.ci_low <= result.auc <= result.ci_high <= 1.0


def test_reliability_bins_keep_empty_bins_and_close_the_top() -> None:
    rows = reliability_bins([0.05, 0.07, 1.0, 0.95], [0, 1, 1, 1])
    assert len(rows) == 10
    assert rows[0].count == 2
    assert rows[0].empirical_freq == pytest.approx(0.5)
    assert rows[9].count == 2
    assert rows[5].count == 0 and rows[5].mean_forecast is None


def test_calibrated_forecasts_sit_on_the_diagonal() -> None:
    rng = np.random.default_rng(41)
    forecasts = rng.uniform(size=10_000)
    outcomes = (rng.uniform(size=10_000) < forecasts).astype(int)
    rows = reliability_bins(forecasts.tolist(), outcomes.tolist())
    assert sum(row.count for row in rows) == 10_000
    for row in rows:
        if row.count:
            assert abs(row.mean_forecast - row.empirical_freq) <= 0.05


def test_interval_coverage_rules() -> None:
    assert interval_covers(0.0, 1.0, 1)
    assert not interval_covers(0.7, 0.95, 1)
    assert interval_covers(0.7, 0.95, 1, CoverageRule.SIDE)
    assert not interval_covers(0.7, 0.95, 0, CoverageRule.SIDE)


def test_tier1_precision_and_event_recall() -> None:
    records = [
        _record(0.9, 4, region="SOM", tier=AlertTier.TIER_1),
        _record(0.9, 3, region="ETH", tier=AlertTier.TIER_1),
        _record(0.4, 4, region="SSD", tier=AlertTier.TIER_3),
    ]
    result = tier_precision_recall(records)
    assert result.precision == pytest.approx(0.5)
    assert result.events == 2
    assert result.events_caught == 1
    assert result.recall == pytest.approx(0.5)


def test_metrics_snapshot_reports_every_metric_with_status() -> None:
    records = [_record(0.8, 4), _record(0.2, 1), _record(0.5, None)]
    snapshot = metrics_snapshot(records)
    assert snapshot["n_graded"] == 2
    assert snapshot["n_ungradable"] == 1
    metrics = snapshot["metrics"]
    assert set(metrics) == {
        "brier",
        "brier_skill_score",
        "crps",
        "reliability",
        "tier1_precision",
        "tier1_recall",
        "interval_coverage",
        "auc",
    }
    assert metrics["brier"]["status"] == MetricStatus.PROVISIONAL.value
    assert metrics["brier"]["value"] == pytest.approx(0.04)
    assert metrics["brier"]["minimum_n"] == MINIMUM_N["brier"]
    assert metrics["crps"]["status"] == MetricStatus.INSUFFICIENT_N.value
    assert metrics["tier1_precision"]["status"] == MetricStatus.INSUFFICIENT_N.value
    assert metrics["tier1_precision"]["value"] is None
    assert metrics["auc"]["status"] == MetricStatus.OK.value
    assert metrics["auc"]["value"]["auc"] == pytest.approx(1.0)


def test_metrics_snapshot_brier_is_ok_at_minimum_n() -> None:
    records = [_record(0.9, 4, reference=REFERENCE_MONDAY + timedelta(weeks=i)) for i in range(MINIMUM_N["brier"])]
    metrics = metrics_snapshot(records)["metrics"]
    assert metrics["brier"]["status"] == MetricStatus.OK.value
    assert metrics["brier_skill_score"]["status"] == MetricStatus.OK.value
    assert metrics["auc"]["status"] == MetricStatus.UNDEFINED.value
