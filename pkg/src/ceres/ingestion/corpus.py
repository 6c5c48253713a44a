"""Deterministic synthetic fixture corpus for end-to-end runs and tests.

Each region gets a latent severity in [0, 1] that drives every source in
the same direction, so high-severity regions converge across pillars and
land in the upper tiers. Output is byte-stable for a given seed.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Collection, Dict, Iterable, List, Mapping, Optional

import numpy as np

from ceres.core.serialization import canonical_dumps
from ceres.core.types import SourceId
from ceres.ingestion.adapters import fixture_path
from ceres.ingestion.spatial import RegionBoundary

LOGGER = logging.getLogger(__name__)

RASTER_PADDING_DEG = 0.5
RASTER_SPACING_DEG = 2.0
IPC_CADENCE_WEEKS = 8
SURVEYS_PER_ROUND = 6


@dataclass
class CorpusSpec:
    end: date
    history_weeks: int = 30
    seed: int = 7
    outcome_weeks: int = 20
    severity: Dict[str, float] = field(default_factory=dict)
    missing: Dict[str, Collection[SourceId]] = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusSummary:
    root: Path
    severities: Dict[str, float]
    files: List[Path]


def region_rng(seed: int, iso3: str, salt: str = "") -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{iso3}:{salt}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def region_severity(seed: int, iso3: str) -> float:
    return float(region_rng(seed, iso3, "severity").uniform(0.0, 1.0) ** 1.5)


def write_corpus(
    root: str | Path,
    regions: Mapping[str, RegionBoundary],
    spec: CorpusSpec,
    *,
    only: Optional[Iterable[str]] = None,
) -> CorpusSummary:
    """Write ``{root}/{SOURCE}/{ISO3}.jsonl`` for every selected region."""
    base = Path(root)
    selected = sorted(only) if only is not None else sorted(regions)
    start = spec.end - timedelta(weeks=spec.history_weeks)
    future = spec.end + timedelta(weeks=spec.outcome_weeks)
    severities: Dict[str, float] = {}
    files: List[Path] = []
    for iso3 in selected:
        boundary = regions[iso3]
        severity = spec.severity.get(iso3, region_severity(spec.seed, iso3))
        severities[iso3] = severity
        skip = set(spec.missing.get(iso3, ()))
        writers = {
            SourceId.CHIRPS: lambda: _gridded(boundary, severity, start, spec.end, spec.seed, "precip_z", _dekads),
            SourceId.MODIS_NDVI: lambda: _gridded(boundary, severity, start, spec.end, spec.seed, "ndvi_z", _months),
            SourceId.ACLED: lambda: _acled(boundary, severity, start, spec.end, spec.seed),
            SourceId.IPC: lambda: _ipc(boundary, severity, start, future, spec.seed),
            SourceId.WFP_FCS: lambda: _surveys(boundary, severity, start, spec.end, spec.seed),
            SourceId.PRICE_INDEX: lambda: _prices(boundary, severity, start, spec.end, spec.seed),
        }
        for source, build in writers.items():
            if source in skip:
                continue
            path = fixture_path(base, source, iso3)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("".join(canonical_dumps(record) + "\n" for record in build()), encoding="utf-8")
            files.append(path)
    LOGGER.info("Wrote %d fixture files for %d regions under %s", len(files), len(selected), base)
    return CorpusSummary(root=base, severities=severities, files=files)


def _dekads(start: date, end: date) -> List[date]:
    days: List[date] = []
    cursor = date(start.year, start.month, 1)
    while cursor <= end:
        for day in (1, 11, 21):
            stamp = cursor.replace(day=day)
            if start <= stamp <= end:
                days.append(stamp)
        cursor = (cursor + timedelta(days=32)).replace(day=1)
    return days


def _months(start: date, end: date) -> List[date]:
    return [stamp for stamp in _dekads(start, end) if stamp.day == 1]


def _gridded(boundary, severity, start, end, seed, variable, schedule) -> List[dict]:
    rng = region_rng(seed, boundary.iso3, variable)
    lat_min, lat_max, lon_min, lon_max = boundary.bbox
    bbox = [
        lat_min - RASTER_PADDING_DEG,
        lat_max + RASTER_PADDING_DEG,
        lon_min - RASTER_PADDING_DEG,
        lon_max + RASTER_PADDING_DEG,
    ]
    shape = [
        max(2, math.ceil((bbox[1] - bbox[0]) / RASTER_SPACING_DEG) + 1),
        max(2, math.ceil((bbox[3] - bbox[2]) / RASTER_SPACING_DEG) + 1),
    ]
    records = []
    for stamp in schedule(start, end):
        values = -2.7 * severity + rng.normal(0.0, 0.25, size=shape[0] * shape[1])
        records.append(
            {
                "date": stamp.isoformat(),
                "variable": variable,
                "bbox": [round(value, 4) for value in bbox],
                "shape": shape,
                "values": [round(float(value), 4) for value in values],
            }
        )
    return records


def _random_points(rng: np.random.Generator, boundary: RegionBoundary, count: int) -> np.ndarray:
    lat_min, lat_max, lon_min, lon_max = boundary.bbox
    margin_lat = (lat_max - lat_min) * 0.05
    margin_lon = (lon_max - lon_min) * 0.05
    lats = rng.uniform(lat_min + margin_lat, lat_max - margin_lat, size=count)
    lons = rng.uniform(lon_min + margin_lon, lon_max - margin_lon, size=count)
    return np.column_stack((lats, lons))


def _acled(boundary, severity, start, end, seed) -> List[dict]:
    rng = region_rng(seed, boundary.iso3, "acled")
    records = []
    week = start - timedelta(days=start.weekday())
    while week <= end:
        count = int(rng.poisson(20.0 * (0.25 + 1.75 * severity)))
        points = _random_points(rng, boundary, count)
        fatalities = rng.poisson(0.5 + 2.5 * severity, size=count)
        records.append(
            {
                "date": week.isoformat(),
                "events": [
                    {"lat": round(float(lat), 4), "lon": round(float(lon), 4), "fatalities": int(deaths)}
                    for (lat, lon), deaths in zip(points, fatalities)
                ],
            }
        )
        week += timedelta(weeks=1)
    return records


def _ipc(boundary, severity, start, end, seed) -> List[dict]:
    rng = region_rng(seed, boundary.iso3, "ipc")
    records = []
    stamp = start + timedelta(days=3)
    while stamp <= end:
        phase = int(np.clip(round(1.0 + 4.0 * severity + rng.normal(0.0, 0.3)), 1, 5))
        records.append({"date": stamp.isoformat(), "phase": phase})
        stamp += timedelta(weeks=IPC_CADENCE_WEEKS)
    return records


def _surveys(boundary, severity, start, end, seed) -> List[dict]:
    rng = region_rng(seed, boundary.iso3, "wfp")
    records = []
    for stamp in _months(start, end):
        points = _random_points(rng, boundary, SURVEYS_PER_ROUND)
        fcs = 42.0 - 30.0 * severity + rng.normal(0.0, 3.0, size=SURVEYS_PER_ROUND)
        rcsi = np.clip(4.0 + 32.0 * severity + rng.normal(0.0, 2.0, size=SURVEYS_PER_ROUND), 0.0, None)
        records.append(
            {
                "date": (stamp + timedelta(days=14)).isoformat(),
                "surveys": [
                    {
                        "lat": round(float(lat), 4),
                        "lon": round(float(lon), 4),
                        "fcs": round(float(score), 2),
                        "rcsi": round(float(coping), 2),
                    }
                    for (lat, lon), score, coping in zip(points, fcs, rcsi)
                ],
            }
        )
    return records


def _prices(boundary, severity, start, end, seed) -> List[dict]:
    rng = region_rng(seed, boundary.iso3, "price")
    return [
        {
            "date": stamp.isoformat(),
            "index": round(100.0 * (1.0 + 0.6 * severity + float(rng.normal(0.0, 0.03))), 2),
        }
        for stamp in _months(start, end)
    ]


__all__ = ["CorpusSpec", "CorpusSummary", "region_rng", "region_severity", "write_corpus"]
