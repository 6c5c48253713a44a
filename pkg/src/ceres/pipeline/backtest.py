"""In-sample back-validation over the recorded historical crisis cases.

Each case ships a fixed FeatureVector, the IPC phase at the reference date and
the phase later observed. The backtest scores every case, grades P(IPC3+)
against the outcome and compares the model with the three reference baselines.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence

from ceres.core.errors import IngestError
from ceres.core.types import AlertTier, ConvergenceLevel, FeatureVector, IpcPhase, ProbabilityVector
from ceres.hypothesis.builder import finalize_probabilities
from ceres.hypothesis.tiers import DEFAULT_TIER_RULES, TierRules
from ceres.scoring.model import DEFAULT_COEFFICIENTS, CoefficientTable, MonotonicityBounds, score_region
from ceres.uncertainty.intervals import PerturbationConfig, sensitivity_interval
from ceres.verification.metrics import BaselineKind, CoverageRule, baseline_forecast, brier_score, interval_covers

LOGGER = logging.getLogger(__name__)

PUBLISHED_BRIER: Dict[str, float] = {
    "ceres": 0.0066,
    BaselineKind.PERSISTENCE.value: 0.0494,
    BaselineKind.CLIMATOLOGY.value: 0.2275,
    BaselineKind.UNINFORMATIVE.value: 0.2500,
}
DISCREPANCY_NOTE = (
    "Published persistence (0.0494) and climatology (0.2275) Brier scores cannot be derived from "
    "the stated inputs; rows above apply (phase - 1) / 4 and the 0.65 base rate to the recorded cases."
)
ALL_CASES = "all"


@dataclass(frozen=True)
class BacktestCase:
    name: str
    region: str
    region_name: str
    reference_date: date
    phase_at_reference: int
    observed_phase: int
    features: FeatureVector

    @property
    def o3(self) -> int:
        return 1 if self.observed_phase >= 3 else 0


@dataclass(frozen=True)
class CaseResult:
    case: BacktestCase
    probabilities: ProbabilityVector
    tier: AlertTier
    covered: bool
    brier: Mapping[str, float]


@dataclass(frozen=True)
class BacktestReport:
    results: Sequence[CaseResult]
    coverage_rule: CoverageRule

    def mean_brier(self, row: str) -> float:
        forecasts = [self._forecast(result, row) for result in self.results]
        return brier_score(forecasts, [result.case.o3 for result in self.results])

    @staticmethod
    def _forecast(result: CaseResult, row: str) -> float:
        if row == "ceres":
            return result.probabilities.p3
        return baseline_forecast(BaselineKind(row), result.case.phase_at_reference)

    @property
    def rows(self) -> List[str]:
        return ["ceres"] + [kind.value for kind in BaselineKind]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coverage_rule": self.coverage_rule.value,
            "cases": [
                {
                    "name": result.case.name,
                    "region": result.case.region,
                    "reference_date": result.case.reference_date.isoformat(),
                    "p3": result.probabilities.p3,
                    "p4": result.probabilities.p4,
                    "p5": result.probabilities.p5,
                    "interval_low": result.probabilities.interval_low,
                    "interval_high": result.probabilities.interval_high,
                    "alert_tier": result.tier.value,
                    "observed_phase": result.case.observed_phase,
                    "interval_covers_outcome": result.covered,
                    "brier": dict(result.brier),
                }
                for result in self.results
            ],
            "mean_brier": {row: self.mean_brier(row) for row in self.rows} if self.results else {},
            "published_mean_brier": dict(PUBLISHED_BRIER),
            "note": DISCREPANCY_NOTE,
        }

    def render(self) -> str:
        lines = [
            f"{'case':<18} {'tier':<7} {'p3':>6} {'p4':>6} {'90% interval':>17} {'obs':>4} {'covered':>8}",
        ]
        for result in self.results:
            pv = result.probabilities
            lines.append(
                f"{result.case.name:<18} {result.tier.value:<7} {pv.p3:>6.3f} {pv.p4:>6.3f} "
                f"{f'[{pv.interval_low:.3f}, {pv.interval_high:.3f}]':>17} "
                f"{result.case.observed_phase:>4} {'yes' if result.covered else 'no':>8}"
            )
        lines.append("")
        lines.append(f"{'model':<16} {'mean Brier':>11} {'published':>10}")
        for row in self.rows:
            value = self.mean_brier(row) if self.results else float("nan")
            lines.append(f"{row:<16} {value:>11.4f} {PUBLISHED_BRIER[row]:>10.4f}")
        lines.append("")
        lines.append(f"Interval coverage rule: {self.coverage_rule.value}")
        lines.append(DISCREPANCY_NOTE)
        return "\n".join(lines)


def load_cases(path: str | Path) -> Dict[str, BacktestCase]:
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"Backtest cases at {source} could not be read: {exc}") from exc
    cases: Dict[str, BacktestCase] = {}
    for raw in data.get("cases", []):
        try:
            case = BacktestCase(
                name=str(raw["name"]),
                region=str(raw["region"]),
                region_name=str(raw.get("region_name", raw["region"])),
                reference_date=date.fromisoformat(raw["reference_date"]),
                phase_at_reference=int(IpcPhase(raw["phase_at_reference"])),
                observed_phase=int(IpcPhase(raw["observed_phase"])),
                features=FeatureVector(**raw["features"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"{source}: malformed backtest case {raw.get('name', '?')!r}: {exc}") from exc
        cases[case.name] = case
    return cases


def select_cases(cases: Mapping[str, BacktestCase], name: str) -> List[BacktestCase]:
    if name == ALL_CASES:
        return list(cases.values())
    if name not in cases:
        raise KeyError(name)
    return [cases[name]]


def _convergence_level(score: float) -> ConvergenceLevel:
    return max(
        (level for level in ConvergenceLevel if level.score <= score + 1e-9),
        key=lambda level: level.score,
    )


def score_case(
    case: BacktestCase,
    *,
    table: CoefficientTable = DEFAULT_COEFFICIENTS,
    bounds: MonotonicityBounds = MonotonicityBounds(),
    perturbation: PerturbationConfig = PerturbationConfig(),
    tiers: TierRules = DEFAULT_TIER_RULES,
    coverage_rule: CoverageRule = CoverageRule.LITERAL,
) -> CaseResult:
    capped = score_region(case.features, table, bounds)
    interval = sensitivity_interval(
        case.features, table, perturbation, region=case.region, reference_date=case.reference_date
    )
    probabilities = finalize_probabilities(
        ProbabilityVector(
            p3=capped.p3, p4=capped.p4, p5=capped.p5, interval_low=interval.low, interval_high=interval.high
        ),
        bounds,
    )
    tier = tiers.classify(
        probabilities.p3,
        probabilities.p4,
        _convergence_level(case.features.convergence_score),
        case.features.composite_stress,
    )
    brier = {"ceres": (probabilities.p3 - case.o3) ** 2}
    for kind in BaselineKind:
        brier[kind.value] = (baseline_forecast(kind, case.phase_at_reference) - case.o3) ** 2
    LOGGER.debug(
        "Backtest %s: p3=%.3f tier=%s",
        case.name,
        probabilities.p3,
        tier.value,
        extra={"stage": "backtest", "region": case.region},
    )
    return CaseResult(
        case=case,
        probabilities=probabilities,
        tier=tier,
        covered=interval_covers(probabilities.interval_low, probabilities.interval_high, case.o3, coverage_rule),
        brier=brier,
    )


def run_backtest(
    cases: Sequence[BacktestCase],
    *,
    table: CoefficientTable = DEFAULT_COEFFICIENTS,
    bounds: MonotonicityBounds = MonotonicityBounds(),
    perturbation: PerturbationConfig = PerturbationConfig(),
    tiers: TierRules = DEFAULT_TIER_RULES,
    coverage_rule: CoverageRule = CoverageRule.LITERAL,
) -> BacktestReport:
    results = [
        score_case(
            case,
            table=table,
            bounds=bounds,
            perturbation=perturbation,
            tiers=tiers,
            coverage_rule=coverage_rule,
        )
        for case in cases
    ]
    return BacktestReport(results=results, coverage_rule=coverage_rule)


__all__ = [
    "ALL_CASES",
    "BacktestCase",
    "BacktestReport",
    "CaseResult",
    "DISCREPANCY_NOTE",
    "PUBLISHED_BRIER",
    "load_cases",
    "run_backtest",
    "score_case",
    "select_cases",
]
