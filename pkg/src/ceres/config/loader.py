"""Pipeline config loader with schema validation.

Relative paths in the ``paths`` block resolve against the directory holding
the config file, so a checked-in config works from any working directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from ceres.core.errors import ConfigError
from ceres.core.types import ISO3_PATTERN
from ceres.hypothesis.drivers import DriverConfidence
from ceres.hypothesis.tiers import TierRules
from ceres.ingestion.frames import FetchMode
from ceres.ingestion.registry import DEFAULT_LOOKBACK_WEEKS
from ceres.scoring.model import MonotonicityBounds
from ceres.scoring.stability import StabilityConfig
from ceres.signals.composite import CssWeights
from ceres.uncertainty.intervals import PerturbationConfig
from ceres.verification.metrics import CoverageRule

DEFAULT_SEED = 20260302


@dataclass(frozen=True)
class PathsConfig:
    fixture_root: Path
    regions_path: Path
    baselines_path: Path
    coefficients_path: Optional[Path]
    output_root: Path
    archive_path: Path
    ledger_dir: Path
    backtest_cases: Optional[Path] = None

    @property
    def hypothesis_ledger(self) -> Path:
        return self.ledger_dir / "hypothesis_ledger.jsonl"

    @property
    def grading_ledger(self) -> Path:
        return self.ledger_dir / "grading_ledger.json"


@dataclass(frozen=True)
class IngestionConfig:
    lookback_weeks: int = DEFAULT_LOOKBACK_WEEKS
    max_workers: int = 8
    fetch_mode: FetchMode = FetchMode.FIXTURE
    http_base_url: Optional[str] = None
    timeout_s: float = 10.0
    max_retries: int = 3


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000


@dataclass(frozen=True)
class PipelineConfig:
    source: Optional[Path]
    config_version: str
    regions: Tuple[str, ...]
    paths: PathsConfig
    seed: int = DEFAULT_SEED
    css_weights: CssWeights = field(default_factory=CssWeights)
    monotonicity: MonotonicityBounds = field(default_factory=MonotonicityBounds)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    ingestion: IngestionConfig = field(default_factory=IngestionConfig)
    drivers: DriverConfidence = field(default_factory=DriverConfidence)
    tiers: TierRules = field(default_factory=TierRules)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    coverage_rule: CoverageRule = CoverageRule.LITERAL


def load_config(path: str | Path) -> PipelineConfig:
    """Load and validate a YAML/JSON pipeline config file."""
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"Config file not found: {source}")

    data = _deserialize(source)
    if not isinstance(data, dict):
        raise ConfigError("Config root must be a mapping")
    return parse_config(data, source)


def _deserialize(source: Path) -> Any:
    text = source.read_text(encoding="utf-8")
    try:
        if source.suffix.lower() == ".json":
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"Config file {source} could not be parsed: {exc}") from exc


def parse_config(data: Dict[str, Any], source: Optional[Path] = None) -> PipelineConfig:
    base = source.parent if source is not None else Path.cwd()
    config_version = _require_str(data, "config_version")
    regions = _parse_regions(data.get("regions"))

    paths_section = _require_dict(data, "paths")
    paths = PathsConfig(
        fixture_root=_require_path(paths_section, "fixture_root", base),
        regions_path=_require_path(paths_section, "regions_path", base),
        baselines_path=_require_path(paths_section, "baselines_path", base),
        coefficients_path=_optional_path(paths_section.get("coefficients_path"), base),
        output_root=_require_path(paths_section, "output_root", base),
        archive_path=_require_path(paths_section, "archive_path", base),
        ledger_dir=_require_path(paths_section, "ledger_dir", base),
        backtest_cases=_optional_path(paths_section.get("backtest_cases"), base),
    )

    seed = _coerce_int(data.get("seed", DEFAULT_SEED), "seed", minimum=0)

    try:
        css_weights = CssWeights.from_mapping(_optional_dict(data, "css_weights"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"css_weights: {exc}") from exc

    mono_section = _optional_dict(data, "monotonicity")
    monotonicity = _build(
        "monotonicity",
        MonotonicityBounds,
        p4_cap_ratio=_optional_float(mono_section, "p4_cap_ratio", MonotonicityBounds.p4_cap_ratio),
        p5_cap_ratio=_optional_float(mono_section, "p5_cap_ratio", MonotonicityBounds.p5_cap_ratio),
    )

    pert_section = _optional_dict(data, "perturbation")
    defaults = PerturbationConfig()
    quantiles = pert_section.get("quantiles", list(defaults.quantiles))
    if not isinstance(quantiles, (list, tuple)) or len(quantiles) != 2:
        raise ConfigError("'perturbation.quantiles' must be a pair of numbers")
    perturbation = _build(
        "perturbation",
        PerturbationConfig,
        draws=_coerce_int(pert_section.get("draws", defaults.draws), "perturbation.draws", minimum=2),
        sigma_normal=_optional_float(pert_section, "sigma_normal", defaults.sigma_normal),
        sigma_low_coverage=_optional_float(pert_section, "sigma_low_coverage", defaults.sigma_low_coverage),
        quantiles=(float(quantiles[0]), float(quantiles[1])),
        seed=seed,
    )
    if perturbation.sigma_low_coverage < perturbation.sigma_normal:
        raise ConfigError("'perturbation.sigma_low_coverage' must be >= sigma_normal")

    stab_section = _optional_dict(data, "stability")
    stability = _build(
        "stability",
        StabilityConfig,
        fraction=_optional_float(stab_section, "fraction", StabilityConfig.fraction),
        draws=_coerce_int(stab_section.get("draws", StabilityConfig.draws), "stability.draws", minimum=1),
    )

    ingest_section = _optional_dict(data, "ingestion")
    try:
        fetch_mode = FetchMode(ingest_section.get("fetch_mode", FetchMode.FIXTURE.value))
    except ValueError as exc:
        raise ConfigError(f"'ingestion.fetch_mode' must be one of {[m.value for m in FetchMode]}") from exc
    ingestion = IngestionConfig(
        lookback_weeks=_coerce_int(
            ingest_section.get("lookback_weeks", DEFAULT_LOOKBACK_WEEKS), "ingestion.lookback_weeks", minimum=1
        ),
        max_workers=_coerce_int(ingest_section.get("max_workers", 8), "ingestion.max_workers", minimum=1),
        fetch_mode=fetch_mode,
        http_base_url=ingest_section.get("http_base_url"),
        timeout_s=_optional_float(ingest_section, "timeout_s", 10.0),
        max_retries=_coerce_int(ingest_section.get("max_retries", 3), "ingestion.max_retries", minimum=0),
    )
    if ingestion.fetch_mode is FetchMode.HTTP_SKELETON and not ingestion.http_base_url:
        raise ConfigError("ingestion.http_base_url is required when fetch_mode is http-skeleton")

    try:
        drivers = DriverConfidence.from_mapping(_optional_dict(data, "drivers"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"drivers: {exc}") from exc

    tier_section = _optional_dict(data, "tiers")
    tiers = TierRules(
        tier1_p4=_optional_float(tier_section, "tier1_p4", TierRules.tier1_p4),
        tier2_p3=_optional_float(tier_section, "tier2_p3", TierRules.tier2_p3),
        tier3_css=_optional_float(tier_section, "tier3_css", TierRules.tier3_css),
    )

    service_section = _optional_dict(data, "service")
    service = ServiceConfig(
        host=str(service_section.get("host", ServiceConfig.host)),
        port=_coerce_int(service_section.get("port", ServiceConfig.port), "service.port", minimum=1),
    )

    try:
        coverage_rule = CoverageRule(data.get("coverage_rule", CoverageRule.LITERAL.value))
    except ValueError as exc:
        raise ConfigError(f"'coverage_rule' must be one of {[r.value for r in CoverageRule]}") from exc

    return PipelineConfig(
        source=source,
        config_version=config_version,
        regions=regions,
        paths=paths,
        seed=seed,
        css_weights=css_weights,
        monotonicity=monotonicity,
        perturbation=perturbation,
        stability=stability,
        ingestion=ingestion,
        drivers=drivers,
        tiers=tiers,
        service=service,
        coverage_rule=coverage_rule,
    )


def _build(section: str, factory: Any, **kwargs: Any) -> Any:
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _parse_regions(value: Any) -> Tuple[str, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("'regions' must be a non-empty list of ISO3 codes")
    regions: List[str] = []
    for item in value:
        if not isinstance(item, str) or not ISO3_PATTERN.match(item):
            raise ConfigError(f"'regions' entries must be uppercase ISO3 codes, got {item!r}")
        if item in regions:
            raise ConfigError(f"'regions' lists {item} twice")
        regions.append(item)
    return tuple(regions)


def _require_dict(obj: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = obj.get(key)
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return value


def _optional_dict(obj: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = obj.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key} block must be a mapping if provided")
    return value


def _require_str(obj: Dict[str, Any], key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ConfigError(f"'{key}' must be a non-empty string")
    return value


def _coerce_int(value: Any, field: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"'{field}' must be an integer, not boolean")
    try:
        parsed = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{field}' must be an integer") from exc
    if parsed != value:
        raise ConfigError(f"'{field}' must be an integer")
    if minimum is not None and parsed < minimum:
        raise ConfigError(f"'{field}' must be >= {minimum}")
    return parsed


def _optional_float(obj: Dict[str, Any], key: str, default: float) -> float:
    value = obj.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number")
    return float(value)


def _require_path(obj: Dict[str, Any], key: str, base: Path) -> Path:
    path = _optional_path(obj.get(key), base)
    if path is None:
        raise ConfigError(f"'paths.{key}' is required")
    return path


def _optional_path(value: Any, base: Path) -> Optional[Path]:
    if not value:
        return None
    if not isinstance(value, str):
        raise ConfigError("Path fields must be strings when provided")
    path = Path(value)
    return path if path.is_absolute() else (base / path).resolve()


__all__ = [
    "DEFAULT_SEED",
    "IngestionConfig",
    "PathsConfig",
    "PipelineConfig",
    "ServiceConfig",
    "load_config",
    "parse_config",
]
