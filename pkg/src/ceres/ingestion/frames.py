"""Canonical frame schema shared by every source adapter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from enum import Enum
from typing import Dict, Optional

from ceres.core.types import SourceId, is_monday

GRID_RESOLUTION = 0.25
N_LAT_CELLS = int(180 / GRID_RESOLUTION)
N_LON_CELLS = int(360 / GRID_RESOLUTION)


class Variable(str, Enum):
    PRECIP_Z = "precip_z"
    NDVI_Z = "ndvi_z"
    CONFLICT_EVENTS = "conflict_events"
    CONFLICT_FATALITIES = "conflict_fatalities"
    IPC_PHASE = "ipc_phase"
    FCS = "fcs"
    RCSI = "rcsi"
    PRICE_INDEX = "price_index"


class NativeCadence(str, Enum):
    DEKADAL = "dekadal"
    MONTHLY = "monthly"
    WEEKLY = "weekly"
    IRREGULAR = "irregular"
    PERIODIC = "periodic"


class FetchMode(str, Enum):
    FIXTURE = "fixture"
    HTTP_SKELETON = "http-skeleton"


GRIDDED_SOURCES = frozenset({SourceId.CHIRPS, SourceId.MODIS_NDVI})


@dataclass(frozen=True, order=True)
class GridCell:
    """Cell on the global 0.25 degree grid, indexed from (-90, -180)."""

    lat_index: int
    lon_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.lat_index < N_LAT_CELLS or not 0 <= self.lon_index < N_LON_CELLS:
            raise ValueError(f"Grid cell ({self.lat_index}, {self.lon_index}) outside global bounds")

    @property
    def center(self) -> tuple[float, float]:
        return (
            -90.0 + GRID_RESOLUTION * (self.lat_index + 0.5),
            -180.0 + GRID_RESOLUTION * (self.lon_index + 0.5),
        )

    @classmethod
    def containing(cls, lat: float, lon: float) -> "GridCell":
        lat_index = min(N_LAT_CELLS - 1, int((lat + 90.0) // GRID_RESOLUTION))
        lon_index = min(N_LON_CELLS - 1, int((lon + 180.0) // GRID_RESOLUTION))
        return cls(lat_index, lon_index)


@dataclass(frozen=True)
class FrameMetadata:
    native_cadence: NativeCadence
    observed_on: date
    retrieved_at: str
    attribution: str


@dataclass(frozen=True)
class CanonicalFrame:
    source: SourceId
    region: str
    week: date
    variable: Variable
    metadata: FrameMetadata
    cells: Dict[GridCell, float] = field(default_factory=dict)
    scalar: Optional[float] = None

    def __post_init__(self) -> None:
        if not is_monday(self.week):
            raise ValueError(f"Frame week {self.week} is not a Monday")
        if self.source in GRIDDED_SOURCES:
            if not self.cells or self.scalar is not None:
                raise ValueError(f"{self.source.value} frames carry grid cells only")
        elif self.cells or self.scalar is None:
            raise ValueError(f"{self.source.value} frames carry exactly one region scalar")

    @property
    def value(self) -> float:
        """Region aggregate: the scalar, or the mean over grid cells."""
        if self.scalar is not None:
            return self.scalar
        return math.fsum(self.cells.values()) / len(self.cells)


def monday_on_or_after(day: date) -> date:
    return day + timedelta(days=(7 - day.weekday()) % 7)


def monday_on_or_before(day: date) -> date:
    return day - timedelta(days=day.weekday())


__all__ = [
    "CanonicalFrame",
    "FetchMode",
    "FrameMetadata",
    "GRIDDED_SOURCES",
    "GRID_RESOLUTION",
    "GridCell",
    "NativeCadence",
    "Variable",
    "monday_on_or_after",
    "monday_on_or_before",
]
