from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from ceres.convergence.detect import classify_convergence, effective_count, flag_pillars
from ceres.core.errors import ConfigError, RegionSkipped, SignalUnavailableError
from ceres.core.types import ConvergenceLevel, Signal, SignalSet
from ceres.signals.baselines import BaselineStats, BaselineTable, load_baselines
from ceres.signals.composite import CssWeights, composite_stress
from ceres.signals.extract import (
    conflict_stress,
    drought_stress,
    extract_signals,
    food_access_stress,
    ipc_stress,
    price_stress,
)
from tests.helpers import CONFIG_DIR, REFERENCE_MONDAY


def _baselines() -> BaselineTable:
    return BaselineTable(
        {
            "SOM": {
                "conflict_events": BaselineStats(mean=20.0, std=8.0, p95=36.0),
                "conflict_fatalities": BaselineStats(mean=30.0, std=15.0, p95=60.0),
                "ipc_phase": BaselineStats(mean=3.0, std=0.5, p95=4.0),
                "fcs": BaselineStats(mean=38.0, std=6.0, p95=48.0),
                "rcsi": BaselineStats(mean=12.0, std=5.0, p95=22.0),
                "price_index": BaselineStats(mean=100.0, std=10.0, p95=118.0),
            }
        }
    )


def test_anomaly_stress_is_deficit_only_and_saturates() -> None:
    assert drought_stress(-1.5) == pytest.approx(0.5)
    assert drought_stress(1.0) == 0.0
    assert drought_stress(-4.0) == 1.0
    with pytest.raises(SignalUnavailableError):
        drought_stress(math.nan)


def test_conflict_stress_blends_events_and_fatalities() -> None:
    events = BaselineStats(mean=20.0, std=8.0, p95=36.0)
    deaths = BaselineStats(mean=30.0, std=15.0, p95=60.0)
    assert conflict_stress(18.0, 90.0, events, deaths) == pytest.approx(0.6 * 0.5 + 0.4 * 1.0)
    with pytest.raises(SignalUnavailableError):
        conflict_stress(18.0, 90.0, None, deaths)


def test_phase_survey_and_price_extractors() -> None:
    assert ipc_stress(4) == pytest.approx(0.75)
    assert food_access_stress(24.5, None) == pytest.approx(0.5)
    assert food_access_stress(None, 21.0) == pytest.approx(0.5)
    assert food_access_stress(24.5, 42.0) == pytest.approx(0.75)
    assert price_stress(150.0, 100.0) == pytest.approx(0.5)
    assert price_stress(90.0, 100.0) == 0.0
    with pytest.raises(SignalUnavailableError):
        food_access_stress(None, None)
    with pytest.raises(SignalUnavailableError):
        price_stress(150.0, None)


def test_extract_signals_leaves_missing_inputs_absent() -> None:
    observations = {
        "precip_z": -1.8,
        "ndvi_z": None,
        "conflict_events": 30.0,
        "conflict_fatalities": 45.0,
        "ipc_phase": 4.0,
        "fcs": 26.0,
        "rcsi": None,
        "price_index": 130.0,
    }
    signals = extract_signals("SOM", REFERENCE_MONDAY, observations, _baselines())
    assert signals.vegetation is None
    assert signals.drought == pytest.approx(0.6)
    assert signals.ipc == pytest.approx(0.75)
    assert signals.ipc_phase == 4
    assert signals.pillar_z[Signal.DROUGHT] == pytest.approx(1.8)
    assert signals.pillar_z[Signal.CONFLICT] == pytest.approx(1.25)
    assert signals.pillar_z[Signal.IPC] == pytest.approx(2.0)
    assert signals.pillar_z[Signal.FOOD_ACCESS] == pytest.approx(2.0)
    assert Signal.VEGETATION not in signals.pillar_z


def test_extract_signals_without_baselines_drops_relative_signals() -> None:
    observations = {"conflict_events": 30.0, "price_index": 130.0, "precip_z": -0.3}
    signals = extract_signals("ETH", REFERENCE_MONDAY, observations, _baselines())
    assert signals.available() == (Signal.DROUGHT,)


def test_composite_stress_rescales_and_applies_coverage() -> None:
    signals = SignalSet(region="SOM", week=REFERENCE_MONDAY, ipc=0.75, conflict=0.5)
    result = composite_stress(signals)
    weighted = (0.25 * 0.75 + 0.20 * 0.5) / 0.45
    assert result.css == pytest.approx(weighted * 2 / 6)
    assert result.coverage_factor == pytest.approx(2 / 6)
    assert result.low_coverage
    assert result.n_available == 2


def test_composite_stress_full_coverage() -> None:
    values = {signal.value: 0.5 for signal in Signal}
    result = composite_stress(SignalSet(region="SOM", week=REFERENCE_MONDAY, **values))
    assert result.css == pytest.approx(0.5)
    assert result.coverage_factor == 1.0
    assert not result.low_coverage


def test_composite_stress_skips_regions_without_signals() -> None:
    with pytest.raises(RegionSkipped):
        composite_stress(SignalSet(region="SOM", week=REFERENCE_MONDAY))


def test_css_weights_must_sum_to_one() -> None:
    with pytest.raises(ValueError):
        CssWeights(ipc=0.5)
    with pytest.raises(ValueError):
        CssWeights.from_mapping({"rainfall": 1.0})


def test_flag_pillars_uses_a_strict_threshold() -> None:
    flags = flag_pillars(
        {
            Signal.DROUGHT: 1.6,
            Signal.VEGETATION: 1.5,
            Signal.CONFLICT: None,
            Signal.IPC: math.nan,
        }
    )
    assert flags.flagged == frozenset({Signal.DROUGHT})


@pytest.mark.parametrize(
    "flagged, expected_count, expected_tier",
    [
        ((), 0.0, ConvergenceLevel.NONE),
        ((Signal.CONFLICT,), 1.0, ConvergenceLevel.WATCH),
        ((Signal.DROUGHT, Signal.VEGETATION), 1.3, ConvergenceLevel.WATCH),
        ((Signal.DROUGHT, Signal.CONFLICT), 2.0, ConvergenceLevel.WARNING),
        ((Signal.DROUGHT, Signal.VEGETATION, Signal.IPC, Signal.FOOD_ACCESS), 2.6, ConvergenceLevel.WARNING),
        ((Signal.DROUGHT, Signal.CONFLICT, Signal.PRICE), 3.0, ConvergenceLevel.CRITICAL),
    ],
)
def test_convergence_tiers_discount_correlated_pairs(flagged, expected_count, expected_tier) -> None:
    flags = flag_pillars({signal: 2.0 for signal in flagged})
    tier = classify_convergence(flags)
    assert effective_count(flags) == pytest.approx(expected_count)
    assert tier.tier is expected_tier
    assert tier.raw_count == len(flagged)
    assert tier.score == expected_tier.score


def test_load_baselines_covers_every_configured_region() -> None:
    table = load_baselines(CONFIG_DIR / "baselines.json")
    assert "SOM" in table.regions()
    assert table.get("SOM", "price_index").mean > 0


def test_load_baselines_rejects_unknown_variables(tmp_path: Path) -> None:
    path = tmp_path / "baselines.json"
    path.write_text(json.dumps({"regions": {"SOM": {"rainfall": {"mean": 1, "std": 1, "p95": 2}}}}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_baselines(path)
