"""Per-region reference statistics for count, survey, phase and price variables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional

from ceres.core.errors import ConfigError, SignalUnavailableError

BASELINE_VARIABLES = (
    "conflict_events",
    "conflict_fatalities",
    "ipc_phase",
    "fcs",
    "rcsi",
    "price_index",
)


@dataclass(frozen=True)
class BaselineStats:
    """Trailing-window mean, standard deviation and 95th percentile."""

    mean: float
    std: float
    p95: float

    def __post_init__(self) -> None:
        for name in ("mean", "std", "p95"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"baseline {name} must be finite")
        if self.std < 0:
            raise ValueError("baseline std must be non-negative")

    def z(self, value: float) -> float:
        if self.std <= 0:
            raise SignalUnavailableError("baseline std is zero; z-score undefined")
        return (value - self.mean) / self.std


class BaselineTable:
    """Read-only lookup of BaselineStats keyed by (iso3, variable)."""

    def __init__(self, entries: Mapping[str, Mapping[str, BaselineStats]]) -> None:
        self._entries: Dict[str, Dict[str, BaselineStats]] = {
            iso3: dict(variables) for iso3, variables in entries.items()
        }

    def get(self, iso3: str, variable: str) -> Optional[BaselineStats]:
        return self._entries.get(iso3, {}).get(variable)

    def regions(self) -> list[str]:
        return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


def load_baselines(path: str | Path) -> BaselineTable:
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"Baseline file not found: {source}")
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Baseline file {source} is not valid JSON: {exc}") from exc
    regions = data.get("regions") if isinstance(data, dict) else None
    if not isinstance(regions, dict):
        raise ConfigError("Baseline file must contain a 'regions' mapping")

    entries: Dict[str, Dict[str, BaselineStats]] = {}
    for iso3, variables in regions.items():
        if not isinstance(variables, dict):
            raise ConfigError(f"Baselines for {iso3} must be a mapping")
        parsed: Dict[str, BaselineStats] = {}
        for variable, stats in variables.items():
            if variable not in BASELINE_VARIABLES:
                raise ConfigError(f"Unknown baseline variable '{variable}' for {iso3}")
            try:
                parsed[variable] = BaselineStats(
                    mean=float(stats["mean"]),
                    std=float(stats["std"]),
                    p95=float(stats["p95"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"Invalid baseline {iso3}.{variable}: {exc}") from exc
        entries[iso3] = parsed
    return BaselineTable(entries)


__all__ = ["BASELINE_VARIABLES", "BaselineStats", "BaselineTable", "load_baselines"]
