from __future__ import annotations

import json
from dataclasses import replace
from datetime import date, datetime, timedelta, timezone

import pytest

from ceres.core.serialization import (
    canonical_dumps,
    format_float,
    format_timestamp,
    hypothesis_to_dict,
    loads_hypothesis,
    dumps_hypothesis,
    quantize,
)
from ceres.core.types import (
    HYPOTHESIS_ID_PATTERN,
    AlertTier,
    FeatureVector,
    IpcPhase,
    ProbabilityVector,
    RegionId,
    Signal,
    SignalSet,
    rank_hypotheses,
)
from ceres.core.validation import validate_hypothesis
from tests.helpers import REFERENCE_MONDAY, make_hypothesis


def test_region_id_requires_uppercase_iso3() -> None:
    assert RegionId("SOM") == "SOM"
    for bad in ("som", "SO", "SOMA", "S0M"):
        with pytest.raises(ValueError):
            RegionId(bad)
    with pytest.raises(ValueError):
        RegionId.within("ETH", {"SOM"})


def test_ipc_phase_rejects_out_of_range_and_booleans() -> None:
    assert IpcPhase(5) == 5
    for bad in (0, 6, 2.5, True):
        with pytest.raises(ValueError):
            IpcPhase(bad)


def test_signal_set_availability_bits_follow_pillar_order() -> None:
    signals = SignalSet(region="SOM", week=REFERENCE_MONDAY, drought=0.4, ipc=0.75)
    assert signals.available() == (Signal.DROUGHT, Signal.IPC)
    assert signals.availability == 0b001001


def test_signal_set_rejects_non_monday_and_out_of_range_scores() -> None:
    with pytest.raises(ValueError):
        SignalSet(region="SOM", week=REFERENCE_MONDAY + timedelta(days=1))
    with pytest.raises(ValueError):
        SignalSet(region="SOM", week=REFERENCE_MONDAY, conflict=1.2)


def test_feature_vector_validates_convergence_and_flag_count() -> None:
    FeatureVector(composite_stress=0.4, convergence_score=0.67, n_independent_flagged=6)
    with pytest.raises(ValueError):
        FeatureVector(composite_stress=0.4, convergence_score=0.5)
    with pytest.raises(ValueError):
        FeatureVector(composite_stress=0.4, n_independent_flagged=7)
    with pytest.raises(ValueError):
        FeatureVector(composite_stress=float("nan"))


def test_probability_vector_reports_cap_violations() -> None:
    ok = ProbabilityVector(p3=0.8, p4=0.56, p5=0.252, interval_low=0.7, interval_high=0.9)
    assert ok.monotonicity_violations() == []
    bad = ProbabilityVector(p3=0.5, p4=0.4, p5=0.3, interval_low=0.4, interval_high=0.6)
    assert len(bad.monotonicity_violations()) == 2


def test_format_float_uses_six_decimals_half_even() -> None:
    assert format_float(0.5) == "0.500000"
    assert format_float(0.0000005) == "0.000000"
    assert format_float(0.0000015) == "0.000002"
    assert format_float(-0.0000001) == "0.000000"
    with pytest.raises(ValueError):
        format_float(float("inf"))
    assert quantize(0.1234567) == pytest.approx(0.123457)


def test_canonical_dumps_keeps_key_order_and_has_no_whitespace() -> None:
    text = canonical_dumps({"b": 1, "a": [True, None, 0.1], "d": date(2026, 3, 2)})
    assert text == '{"b":1,"a":[true,null,0.100000],"d":"2026-03-02"}'
    with pytest.raises(TypeError):
        canonical_dumps({"x": object()})


def test_timestamps_must_be_utc_aware() -> None:
    stamp = datetime(2026, 3, 2, 6, 0, tzinfo=timezone.utc)
    assert format_timestamp(stamp) == "2026-03-02T06:00:00Z"
    with pytest.raises(ValueError):
        format_timestamp(datetime(2026, 3, 2, 6, 0))


def test_hypothesis_survives_canonical_json() -> None:
    hypothesis = make_hypothesis()
    text = dumps_hypothesis(hypothesis)
    assert loads_hypothesis(text) == hypothesis
    assert list(json.loads(text)) == list(hypothesis_to_dict(hypothesis))


def test_built_hypothesis_is_valid_and_well_formed() -> None:
    hypothesis = make_hypothesis("ETH")
    assert HYPOTHESIS_ID_PATTERN.match(hypothesis.hypothesis_id)
    assert hypothesis.hypothesis_id.startswith("CERES-HYP-ETH-20260302-")
    assert hypothesis.created_at == datetime(2026, 3, 2, 6, 0, tzinfo=timezone.utc)
    assert hypothesis.falsification_plan.horizon_date == date(2026, 5, 31)
    assert validate_hypothesis(hypothesis) == []


def test_validate_hypothesis_collects_every_violation() -> None:
    hypothesis = make_hypothesis()
    broken = replace(
        hypothesis,
        hypothesis_id=hypothesis.hypothesis_id.replace("SOM", "som"),
        famine_probability=replace(hypothesis.famine_probability, p4=0.79, interval_low=0.85),
        forecast_horizon_days=60,
        created_at=datetime(2026, 3, 2, 6, 0),
    )
    violations = validate_hypothesis(broken)
    assert any("lowercase ISO3" in v for v in violations)
    assert any("p4 >" in v for v in violations)
    assert any("interval does not contain p3" in v for v in violations)
    assert any("forecast_horizon_days" in v for v in violations)
    assert any("created_at" in v for v in violations)


def test_validate_hypothesis_checks_monitoring_set() -> None:
    violations = validate_hypothesis(make_hypothesis("YEM"), monitoring={"SOM"})
    assert violations == ["region_id YEM is not in the monitoring set"]


def test_ranking_orders_by_tier_then_p4_then_iso3() -> None:
    som = make_hypothesis("SOM", p3=0.9, p4=0.6, p5=0.2)
    ssd = make_hypothesis("SSD", p3=0.9, p4=0.6, p5=0.2)
    yem = make_hypothesis("YEM", p3=0.95, p4=0.65, p5=0.2)
    eth = make_hypothesis("ETH", p3=0.6, p4=0.3, p5=0.1, tier=AlertTier.TIER_2)
    ranked = rank_hypotheses([eth, ssd, som, yem])
    assert [h.region_id for h in ranked] == ["YEM", "SOM", "SSD", "ETH"]
