"""Region outlines, point-in-polygon joins, and region cell masks."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from ceres.core.errors import ConfigError
from ceres.core.types import RegionId
from ceres.ingestion.frames import GRID_RESOLUTION, GridCell

LOGGER = logging.getLogger(__name__)

EDGE_TOLERANCE = 1e-9


class JoinMode(str, Enum):
    SUM = "sum"
    MEAN = "mean"


@dataclass(frozen=True)
class RegionBoundary:
    """Simplified outline; ``polygon`` is a ring of (lat, lon) vertices."""

    iso3: str
    name: str
    polygon: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        RegionId(self.iso3)
        if len(self.polygon) < 3:
            raise ValueError(f"Region {self.iso3} polygon needs at least 3 vertices")

    @property
    def bbox(self) -> Tuple[float, float, float, float]:
        lats = [vertex[0] for vertex in self.polygon]
        lons = [vertex[1] for vertex in self.polygon]
        return min(lats), max(lats), min(lons), max(lons)


def points_in_polygon(lats: np.ndarray, lons: np.ndarray, polygon: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Even-odd ray casting; points on an edge or vertex count as inside."""
    y = np.asarray(lats, dtype=float)
    x = np.asarray(lons, dtype=float)
    ring = np.asarray(polygon, dtype=float)
    if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
        ring = ring[:-1]
    inside = np.zeros(y.shape, dtype=bool)
    on_edge = np.zeros(y.shape, dtype=bool)
    for (y1, x1), (y2, x2) in zip(ring, np.roll(ring, -1, axis=0)):
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        within = (
            (x >= min(x1, x2) - EDGE_TOLERANCE)
            & (x <= max(x1, x2) + EDGE_TOLERANCE)
            & (y >= min(y1, y2) - EDGE_TOLERANCE)
            & (y <= max(y1, y2) + EDGE_TOLERANCE)
        )
        on_edge |= within & (np.abs(cross) <= EDGE_TOLERANCE)
        if y1 == y2:
            continue
        straddles = (y1 > y) != (y2 > y)
        x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddles & (x < x_cross)
    return inside | on_edge


def spatial_join(
    points: Iterable[Tuple[float, float, float]],
    boundary: RegionBoundary,
    mode: JoinMode,
) -> Optional[float]:
    """Aggregate in-polygon point values; ``None`` when no point falls inside."""
    rows = np.asarray(list(points), dtype=float).reshape(-1, 3)
    if rows.size == 0:
        return None
    mask = points_in_polygon(rows[:, 0], rows[:, 1], boundary.polygon)
    if not mask.any():
        return None
    selected = rows[mask, 2]
    if mode is JoinMode.SUM:
        return float(selected.sum())
    return float(selected.mean())


@lru_cache(maxsize=None)
def region_cells(boundary: RegionBoundary) -> Tuple[GridCell, ...]:
    """Grid cells whose centers lie inside the region outline."""
    lat_min, lat_max, lon_min, lon_max = boundary.bbox
    first = GridCell.containing(lat_min, lon_min)
    last = GridCell.containing(lat_max, lon_max)
    lat_idx = np.arange(first.lat_index, last.lat_index + 1)
    lon_idx = np.arange(first.lon_index, last.lon_index + 1)
    grid_lat, grid_lon = np.meshgrid(lat_idx, lon_idx, indexing="ij")
    centers_lat = -90.0 + GRID_RESOLUTION * (grid_lat + 0.5)
    centers_lon = -180.0 + GRID_RESOLUTION * (grid_lon + 0.5)
    mask = points_in_polygon(centers_lat.ravel(), centers_lon.ravel(), boundary.polygon)
    cells = tuple(
        GridCell(int(lat), int(lon)) for lat, lon in zip(grid_lat.ravel()[mask], grid_lon.ravel()[mask])
    )
    if not cells:
        # Tiny outlines still need one cell for gridded sources.
        center_lat = (lat_min + lat_max) / 2.0
        center_lon = (lon_min + lon_max) / 2.0
        cells = (GridCell.containing(center_lat, center_lon),)
    return cells


def load_regions(path: str | Path) -> Dict[str, RegionBoundary]:
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"Region outline file not found: {source}")
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Region outline file {source} is not valid JSON: {exc}") from exc
    entries = data.get("regions") if isinstance(data, dict) else None
    if not isinstance(entries, list):
        raise ConfigError("Region outline file must contain a 'regions' list")

    regions: Dict[str, RegionBoundary] = {}
    for entry in entries:
        try:
            boundary = RegionBoundary(
                iso3=entry["iso3"],
                name=entry["name"],
                polygon=tuple((float(lat), float(lon)) for lat, lon in entry["polygon"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid region outline entry {entry!r}: {exc}") from exc
        if boundary.iso3 in regions:
            raise ConfigError(f"Duplicate region outline for {boundary.iso3}")
        regions[boundary.iso3] = boundary
    LOGGER.debug("Loaded %d region outlines from %s", len(regions), source)
    return regions


__all__ = [
    "JoinMode",
    "RegionBoundary",
    "load_regions",
    "points_in_polygon",
    "region_cells",
    "spatial_join",
]
