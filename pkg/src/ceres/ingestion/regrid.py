"""Bilinear regridding of native rasters onto the 0.25 degree grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ceres.core.errors import OutOfBoundsError
from ceres.ingestion.frames import GridCell

# Cell centers sitting on the hull edge must not be rejected by rounding.
HULL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Raster:
    """Regular lat/lon node grid; ``values[i, j]`` sits at ``(lats[i], lons[j])``."""

    lats: np.ndarray
    lons: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.lats.size, self.lons.size):
            raise ValueError(
                f"Raster values shape {self.values.shape} does not match nodes ({self.lats.size}, {self.lons.size})"
            )
        if self.lats.size < 2 or self.lons.size < 2:
            raise ValueError("Raster needs at least 2x2 nodes for bilinear interpolation")
        if np.any(np.diff(self.lats) <= 0) or np.any(np.diff(self.lons) <= 0):
            raise ValueError("Raster node coordinates must be strictly increasing")

    @classmethod
    def from_bbox(cls, bbox: Sequence[float], shape: Sequence[int], values: Sequence[float]) -> "Raster":
        """Build from ``[lat_min, lat_max, lon_min, lon_max]`` and a row-major node array."""
        lat_min, lat_max, lon_min, lon_max = (float(value) for value in bbox)
        n_lat, n_lon = (int(value) for value in shape)
        grid = np.asarray(values, dtype=float)
        if grid.size != n_lat * n_lon:
            raise ValueError(f"Raster has {grid.size} values for shape {n_lat}x{n_lon}")
        return cls(
            lats=np.linspace(lat_min, lat_max, n_lat),
            lons=np.linspace(lon_min, lon_max, n_lon),
            values=grid.reshape(n_lat, n_lon),
        )

    def contains(self, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
        return (
            (lats >= self.lats[0] - HULL_TOLERANCE)
            & (lats <= self.lats[-1] + HULL_TOLERANCE)
            & (lons >= self.lons[0] - HULL_TOLERANCE)
            & (lons <= self.lons[-1] + HULL_TOLERANCE)
        )


def bilinear_at(raster: Raster, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Interpolate at arbitrary points already known to lie inside the hull."""
    interpolator = RegularGridInterpolator((raster.lats, raster.lons), raster.values, method="linear")
    points = np.column_stack(
        (
            np.clip(lats, raster.lats[0], raster.lats[-1]),
            np.clip(lons, raster.lons[0], raster.lons[-1]),
        )
    )
    return interpolator(points)


def bilinear_regrid(raster: Raster, targets: Iterable[GridCell]) -> Dict[GridCell, float]:
    """Blend the four surrounding raster nodes at every target cell center."""
    cells: List[GridCell] = list(targets)
    if not cells:
        return {}
    centers = np.array([cell.center for cell in cells], dtype=float)
    inside = raster.contains(centers[:, 0], centers[:, 1])
    if not inside.all():
        outside = [cell for cell, ok in zip(cells, inside) if not ok]
        raise OutOfBoundsError(f"{len(outside)} target cells fall outside the raster hull", cells=outside)
    values = bilinear_at(raster, centers[:, 0], centers[:, 1])
    return {cell: float(value) for cell, value in zip(cells, values)}


__all__ = ["Raster", "bilinear_at", "bilinear_regrid"]
