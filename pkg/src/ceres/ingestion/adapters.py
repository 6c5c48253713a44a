"""Fixture-backed source adapters.

Layout: ``{fixture_root}/{SOURCE}/{ISO3}.jsonl``, one native observation per
line. Every line carries a ``date``; gridded lines add ``bbox``
(``[lat_min, lat_max, lon_min, lon_max]``), ``shape`` and row-major ``values``.
"""

from __future__ import annotations

import json
import logging
import math
from datetime import date, timedelta
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from ceres.core.errors import IngestError, OutOfBoundsError, SourceUnavailableError
from ceres.core.types import SourceId
from ceres.ingestion.frames import (
    CanonicalFrame,
    FetchMode,
    FrameMetadata,
    Variable,
    monday_on_or_after,
)
from ceres.ingestion.regrid import Raster, bilinear_regrid
from ceres.ingestion.registry import AdapterDescriptor, AdapterRegistry, SourceAdapter, default_descriptor
from ceres.ingestion.spatial import JoinMode, RegionBoundary, region_cells, spatial_join

LOGGER = logging.getLogger(__name__)

GRIDDED_VARIABLES: Dict[SourceId, Variable] = {
    SourceId.CHIRPS: Variable.PRECIP_Z,
    SourceId.MODIS_NDVI: Variable.NDVI_Z,
}

Record = Mapping[str, Any]


def fixture_path(fixture_root: Path, source: SourceId, iso3: str) -> Path:
    return Path(fixture_root) / source.value / f"{iso3}.jsonl"


class FixtureAdapter(SourceAdapter):
    """Reads JSON-lines fixtures and normalizes them onto the canonical schema."""

    def __init__(self, descriptor: AdapterDescriptor, fixture_root: str | Path) -> None:
        super().__init__(descriptor)
        self._root = Path(fixture_root)
        self._parsers: Dict[SourceId, Callable[..., List[CanonicalFrame]]] = {
            SourceId.CHIRPS: self._parse_gridded,
            SourceId.MODIS_NDVI: self._parse_gridded,
            SourceId.ACLED: self._parse_acled,
            SourceId.IPC: self._parse_ipc,
            SourceId.WFP_FCS: self._parse_surveys,
            SourceId.PRICE_INDEX: self._parse_price,
        }

    @property
    def fixture_root(self) -> Path:
        return self._root

    def fetch(self, region: RegionBoundary, week: date, lookback_weeks: int) -> List[CanonicalFrame]:
        path = fixture_path(self._root, self.source, region.iso3)
        if not path.exists():
            raise SourceUnavailableError(f"no fixture at {path}")
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"{path}: unreadable fixture ({exc})") from exc
        return self.parse_lines(text.splitlines(), region, week, lookback_weeks, origin=str(path))

    def parse_lines(
        self,
        lines: List[str],
        region: RegionBoundary,
        week: date,
        lookback_weeks: int,
        *,
        origin: str = "<memory>",
    ) -> List[CanonicalFrame]:
        start = week - timedelta(weeks=lookback_weeks)
        frames: List[CanonicalFrame] = []
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            where = f"{origin}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise IngestError(f"{where}: each line must be a JSON object")
            observed, frame_week = _observation_week(record, where)
            if not start <= frame_week <= week:
                continue
            metadata = FrameMetadata(
                native_cadence=self.descriptor.native_cadence,
                observed_on=observed,
                retrieved_at=str(record.get("retrieved_at", observed.isoformat())),
                attribution=str(record.get("attribution") or self.descriptor.attribution),
            )
            try:
                frames.extend(self._parsers[self.source](record, region, frame_week, metadata))
            except IngestError as exc:
                raise IngestError(f"{where}: {exc}") from exc
            except (KeyError, TypeError, ValueError) as exc:
                raise IngestError(f"{where}: malformed {self.source.value} record ({exc})") from exc
        return frames

    def _frame(
        self,
        region: RegionBoundary,
        week: date,
        variable: Variable,
        metadata: FrameMetadata,
        *,
        scalar: Optional[float] = None,
        cells: Optional[Dict] = None,
    ) -> CanonicalFrame:
        return CanonicalFrame(
            source=self.source,
            region=region.iso3,
            week=week,
            variable=variable,
            metadata=metadata,
            cells=cells or {},
            scalar=scalar,
        )

    def _parse_gridded(
        self, record: Record, region: RegionBoundary, week: date, metadata: FrameMetadata
    ) -> List[CanonicalFrame]:
        expected = GRIDDED_VARIABLES[self.source]
        variable = record.get("variable", expected.value)
        if variable != expected.value:
            raise IngestError(f"expected variable {expected.value}, got {variable!r}")
        raster = Raster.from_bbox(record["bbox"], record["shape"], record["values"])
        if not all(math.isfinite(value) for value in raster.values.ravel()):
            raise IngestError("raster contains non-finite values")
        try:
            cells = bilinear_regrid(raster, region_cells(region))
        except OutOfBoundsError as exc:
            raise IngestError(f"raster does not cover {region.iso3}: {exc}") from exc
        return [self._frame(region, week, expected, metadata, cells=cells)]

    def _parse_acled(
        self, record: Record, region: RegionBoundary, week: date, metadata: FrameMetadata
    ) -> List[CanonicalFrame]:
        events = record["events"]
        if not isinstance(events, list):
            raise IngestError("'events' must be a list")
        located = [(float(event["lat"]), float(event["lon"])) for event in events]
        fatalities = [float(event.get("fatalities", 0)) for event in events]
        count = spatial_join(((lat, lon, 1.0) for lat, lon in located), region, JoinMode.SUM)
        deaths = spatial_join(
            ((lat, lon, value) for (lat, lon), value in zip(located, fatalities)), region, JoinMode.SUM
        )
        # An observed week with no in-region events is a genuine zero.
        return [
            self._frame(region, week, Variable.CONFLICT_EVENTS, metadata, scalar=count or 0.0),
            self._frame(region, week, Variable.CONFLICT_FATALITIES, metadata, scalar=deaths or 0.0),
        ]

    def _parse_ipc(
        self, record: Record, region: RegionBoundary, week: date, metadata: FrameMetadata
    ) -> List[CanonicalFrame]:
        phase = record["phase"]
        if isinstance(phase, bool) or not isinstance(phase, int) or not 1 <= phase <= 5:
            raise IngestError(f"IPC phase must be an integer 1..5, got {phase!r}")
        return [self._frame(region, week, Variable.IPC_PHASE, metadata, scalar=float(phase))]

    def _parse_surveys(
        self, record: Record, region: RegionBoundary, week: date, metadata: FrameMetadata
    ) -> List[CanonicalFrame]:
        surveys = record["surveys"]
        if not isinstance(surveys, list):
            raise IngestError("'surveys' must be a list")
        frames: List[CanonicalFrame] = []
        for key, variable in (("fcs", Variable.FCS), ("rcsi", Variable.RCSI)):
            points = [
                (float(item["lat"]), float(item["lon"]), float(item[key]))
                for item in surveys
                if item.get(key) is not None
            ]
            mean = spatial_join(points, region, JoinMode.MEAN)
            if mean is not None:
                frames.append(self._frame(region, week, variable, metadata, scalar=mean))
        return frames

    def _parse_price(
        self, record: Record, region: RegionBoundary, week: date, metadata: FrameMetadata
    ) -> List[CanonicalFrame]:
        index = float(record["index"])
        if not math.isfinite(index) or index <= 0:
            raise IngestError(f"price index must be positive, got {record['index']!r}")
        return [self._frame(region, week, Variable.PRICE_INDEX, metadata, scalar=index)]


def _observation_week(record: Record, where: str) -> Tuple[date, date]:
    raw_date = record.get("date")
    raw_week = record.get("week")
    if raw_date is None and raw_week is None:
        raise IngestError(f"{where}: record needs a 'date' or 'week'")
    try:
        observed = date.fromisoformat(raw_date) if raw_date is not None else None
        explicit = date.fromisoformat(raw_week) if raw_week is not None else None
    except (TypeError, ValueError) as exc:
        raise IngestError(f"{where}: invalid ISO date ({exc})") from exc
    if explicit is not None:
        if explicit.weekday() != 0:
            raise IngestError(f"{where}: week {explicit.isoformat()} is not a Monday")
        return observed or explicit, explicit
    return observed, monday_on_or_after(observed)


def build_fixture_registry(fixture_root: str | Path) -> AdapterRegistry:
    registry = AdapterRegistry()
    for source in SourceId:
        registry.register(FixtureAdapter(default_descriptor(source, FetchMode.FIXTURE), fixture_root))
    return registry


__all__ = ["FixtureAdapter", "build_fixture_registry", "fixture_path"]
