from __future__ import annotations

import pytest

from ceres.core.types import AlertTier
from ceres.pipeline.backtest import (
    DISCREPANCY_NOTE,
    PUBLISHED_BRIER,
    load_cases,
    run_backtest,
    score_case,
    select_cases,
)
from ceres.uncertainty.intervals import PerturbationConfig
from ceres.verification.metrics import CoverageRule
from tests.helpers import BACKTEST_CASES

EXPECTED_P3 = {
    "somalia-2011": 0.961,
    "south-sudan-2017": 0.934,
    "tigray-2022": 0.912,
    "yemen-2021": 0.887,
}
FAST = PerturbationConfig(draws=400)


def test_cases_load_in_file_order() -> None:
    cases = load_cases(BACKTEST_CASES)
    assert list(cases) == list(EXPECTED_P3)
    assert cases["tigray-2022"].region == "ETH"
    assert cases["tigray-2022"].phase_at_reference == 3
    assert all(case.o3 == 1 for case in cases.values())


def test_select_cases() -> None:
    cases = load_cases(BACKTEST_CASES)
    assert len(select_cases(cases, "all")) == 4
    assert [c.name for c in select_cases(cases, "yemen-2021")] == ["yemen-2021"]
    with pytest.raises(KeyError):
        select_cases(cases, "darfur-2004")


@pytest.mark.parametrize("name", sorted(EXPECTED_P3))
def test_each_case_reproduces_its_probability_and_tier(name: str) -> None:
    case = load_cases(BACKTEST_CASES)[name]
    result = score_case(case, perturbation=FAST)
    pv = result.probabilities
    assert pv.p3 == pytest.approx(EXPECTED_P3[name], abs=5e-4)
    assert pv.p4 <= 0.7 * pv.p3 + 1e-6
    assert pv.p5 <= 0.45 * pv.p4 + 1e-6
    assert pv.interval_low <= pv.p3 <= pv.interval_high
    assert result.tier is AlertTier.TIER_1


def test_mean_brier_against_baselines() -> None:
    report = run_backtest(list(load_cases(BACKTEST_CASES).values()), perturbation=FAST)
    assert report.mean_brier("ceres") == pytest.approx(0.0065975, abs=1e-4)
    assert report.mean_brier("persistence") == pytest.approx(0.109375)
    assert report.mean_brier("climatology") == pytest.approx(0.1225)
    assert report.mean_brier("uninformative") == pytest.approx(0.25)
    assert report.mean_brier("ceres") < min(report.mean_brier(row) for row in report.rows[1:])


def test_report_outputs_carry_published_figures() -> None:
    report = run_backtest(list(load_cases(BACKTEST_CASES).values()), perturbation=FAST)
    payload = report.to_dict()
    assert payload["coverage_rule"] == "literal"
    assert [case["name"] for case in payload["cases"]] == list(EXPECTED_P3)
    assert payload["published_mean_brier"] == PUBLISHED_BRIER
    assert set(payload["mean_brier"]) == {"ceres", "persistence", "climatology", "uninformative"}
    # Literal coverage: a band strictly inside (0, 1) never contains a 0/1 outcome.
    assert not any(case["interval_covers_outcome"] for case in payload["cases"])

    text = report.render()
    assert "somalia-2011" in text
    assert "TIER-1" in text
    assert DISCREPANCY_NOTE in text


def test_side_rule_counts_high_bands_as_covering() -> None:
    report = run_backtest(
        list(load_cases(BACKTEST_CASES).values()), perturbation=FAST, coverage_rule=CoverageRule.SIDE
    )
    assert all(result.covered for result in report.results)
