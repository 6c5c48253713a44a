"""Adapter registry: one source adapter per SourceId."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import date
from typing import Dict, List

from ceres.core.errors import DuplicateAdapterError, SourceUnavailableError
from ceres.core.types import SourceId
from ceres.ingestion.frames import CanonicalFrame, FetchMode, NativeCadence
from ceres.ingestion.spatial import RegionBoundary

LOGGER = logging.getLogger(__name__)

DEFAULT_LOOKBACK_WEEKS = 26


@dataclass(frozen=True)
class AdapterDescriptor:
    source: SourceId
    native_cadence: NativeCadence
    fetch_mode: FetchMode
    attribution: str


SOURCE_CADENCES: Dict[SourceId, NativeCadence] = {
    SourceId.CHIRPS: NativeCadence.DEKADAL,
    SourceId.MODIS_NDVI: NativeCadence.MONTHLY,
    SourceId.ACLED: NativeCadence.WEEKLY,
    SourceId.IPC: NativeCadence.IRREGULAR,
    SourceId.WFP_FCS: NativeCadence.PERIODIC,
    SourceId.PRICE_INDEX: NativeCadence.MONTHLY,
}

SOURCE_ATTRIBUTIONS: Dict[SourceId, str] = {
    SourceId.CHIRPS: "CHIRPS v2.0, UCSB Climate Hazards Group",
    SourceId.MODIS_NDVI: "MODIS MOD13A3 NDVI, NASA Earthdata",
    SourceId.ACLED: "Armed Conflict Location and Event Data Project (ACLED)",
    SourceId.IPC: "IPC Global Platform",
    SourceId.WFP_FCS: "WFP VAM household surveys (FCS, rCSI)",
    SourceId.PRICE_INDEX: "FAO / WFP cereal price monitoring",
}


def default_descriptor(source: SourceId, fetch_mode: FetchMode = FetchMode.FIXTURE) -> AdapterDescriptor:
    return AdapterDescriptor(
        source=source,
        native_cadence=SOURCE_CADENCES[source],
        fetch_mode=fetch_mode,
        attribution=SOURCE_ATTRIBUTIONS[source],
    )


class SourceAdapter(ABC):
    """Maps one upstream source onto CanonicalFrames for a region."""

    def __init__(self, descriptor: AdapterDescriptor) -> None:
        self._descriptor = descriptor

    @property
    def descriptor(self) -> AdapterDescriptor:
        return self._descriptor

    @property
    def source(self) -> SourceId:
        return self._descriptor.source

    @abstractmethod
    def fetch(self, region: RegionBoundary, week: date, lookback_weeks: int) -> List[CanonicalFrame]:
        """Return frames with week in [week - lookback, week].

        Raises SourceUnavailableError when the source has nothing for the
        region and IngestError when the payload is malformed.
        """


class AdapterRegistry:
    """Read-only after startup; lookups are safe from worker threads."""

    def __init__(self) -> None:
        self._adapters: Dict[SourceId, SourceAdapter] = {}

    def register(self, adapter: SourceAdapter) -> SourceAdapter:
        source = adapter.source
        if source in self._adapters:
            raise DuplicateAdapterError(f"An adapter for {source.value} is already registered")
        self._adapters[source] = adapter
        LOGGER.debug(
            "Registered %s adapter (%s, %s)",
            source.value,
            adapter.descriptor.fetch_mode.value,
            adapter.descriptor.native_cadence.value,
        )
        return adapter

    def get(self, source: SourceId) -> SourceAdapter:
        try:
            return self._adapters[source]
        except KeyError as exc:
            raise SourceUnavailableError(f"No adapter registered for {source.value}") from exc

    def sources(self) -> List[SourceId]:
        return [source for source in SourceId if source in self._adapters]

    def descriptors(self) -> List[AdapterDescriptor]:
        return [self._adapters[source].descriptor for source in self.sources()]

    def __len__(self) -> int:
        return len(self._adapters)

    def __contains__(self, source: object) -> bool:
        return source in self._adapters

    def ingest(
        self,
        source: SourceId,
        region: RegionBoundary,
        week: date,
        lookback_weeks: int = DEFAULT_LOOKBACK_WEEKS,
    ) -> List[CanonicalFrame]:
        """Frames for one (source, region); empty when the source is unavailable.

        IngestError propagates so the caller can halt the run.
        """
        try:
            frames = self.get(source).fetch(region, week, lookback_weeks)
        except SourceUnavailableError as exc:
            LOGGER.warning(
                "%s unavailable for %s: %s",
                source.value,
                region.iso3,
                exc,
                extra={"stage": "ingest", "region": region.iso3},
            )
            return []
        return frames


__all__ = [
    "AdapterDescriptor",
    "AdapterRegistry",
    "DEFAULT_LOOKBACK_WEEKS",
    "SOURCE_ATTRIBUTIONS",
    "SOURCE_CADENCES",
    "SourceAdapter",
    "default_descriptor",
]
