"""Builders shared by the unit, integration and smoke suites."""

from __future__ import annotations

import json
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import yaml

from ceres.core.types import (
    AlertTier,
    ConvergenceLevel,
    DriverCluster,
    DriverType,
    FamineHypothesis,
    FeatureVector,
    ProbabilityVector,
    SourceId,
)
from ceres.hypothesis.builder import build_hypothesis, evidence_items
from ceres.ingestion.registry import SOURCE_ATTRIBUTIONS

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = REPO_ROOT / "config"
BACKTEST_CASES = REPO_ROOT / "fixtures" / "backtest" / "cases.json"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

REFERENCE_MONDAY = date(2026, 3, 2)
RUN_TS = datetime(2026, 3, 2, 6, 30, tzinfo=timezone.utc)
TEST_REGIONS = ("ETH", "SOM", "SSD", "YEM")
TEST_SEVERITY = {"SOM": 0.9, "SSD": 0.75, "ETH": 0.45, "YEM": 0.05}


def make_hypothesis(
    region: str = "SOM",
    *,
    reference_date: date = REFERENCE_MONDAY,
    p3: float = 0.8,
    p4: float = 0.5,
    p5: float = 0.2,
    css: float = 0.4,
    tier: AlertTier = AlertTier.TIER_1,
    interval: Optional[tuple[float, float]] = None,
    low_coverage: bool = False,
    stable: bool = True,
) -> FamineHypothesis:
    features = FeatureVector(
        composite_stress=css,
        ipc_stress=0.75,
        conflict_stress=0.3,
        low_coverage=low_coverage,
    )
    low, high = interval if interval is not None else (max(0.0, p3 - 0.1), min(1.0, p3 + 0.05))
    latest = {source: reference_date for source in SourceId}
    return build_hypothesis(
        region=region,
        region_name=f"Region {region}",
        reference_date=reference_date,
        features=features,
        probabilities=ProbabilityVector(p3=p3, p4=p4, p5=p5, interval_low=low, interval_high=high),
        tier=tier,
        convergence=ConvergenceLevel.WARNING,
        drivers=[
            DriverCluster(DriverType.IPC_TREND, 0.75, 0.95),
            DriverCluster(DriverType.CONFLICT, 0.3, 0.91),
        ],
        evidence=evidence_items(reference_date, latest, SOURCE_ATTRIBUTIONS),
        stable=stable,
        coverage_factor=4 / 6 if low_coverage else 1.0,
        current_phase=4,
    )


def config_dict(tmp_path: Path, regions: Iterable[str] = TEST_REGIONS, **overrides: Any) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "config_version": "test-001",
        "seed": 20260302,
        "regions": list(regions),
        "paths": {
            "fixture_root": str(tmp_path / "corpus"),
            "regions_path": str(CONFIG_DIR / "regions.json"),
            "baselines_path": str(CONFIG_DIR / "baselines.json"),
            "coefficients_path": str(CONFIG_DIR / "coefficients.json"),
            "output_root": str(tmp_path / "out"),
            "archive_path": str(tmp_path / "var" / "archive.sqlite"),
            "ledger_dir": str(tmp_path / "var" / "ledger"),
            "backtest_cases": str(BACKTEST_CASES),
        },
        "perturbation": {"draws": 400},
        "stability": {"draws": 20},
        "ingestion": {"max_workers": 4},
    }
    data.update(overrides)
    return data


def write_config(tmp_path: Path, data: Dict[str, Any], name: str = "ceres.yaml") -> Path:
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def load_golden(name: str) -> Dict[str, Any]:
    return json.loads((GOLDEN_DIR / name).read_text(encoding="utf-8"))
