"""HTTP adapter skeleton: fetch with retry, transcribe into fixture lines, parse as fixtures.

Not wired to any production endpoint; it keeps the registry honest about the
shape a live adapter takes.
"""

from __future__ import annotations

import logging
import time
from datetime import date
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import requests

from ceres.core.errors import IngestError, SourceUnavailableError
from ceres.core.serialization import canonical_dumps
from ceres.ingestion.adapters import FixtureAdapter, fixture_path
from ceres.ingestion.frames import CanonicalFrame
from ceres.ingestion.registry import AdapterDescriptor, SourceAdapter
from ceres.ingestion.spatial import RegionBoundary

LOGGER = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class HttpSkeletonAdapter(SourceAdapter):
    def __init__(
        self,
        descriptor: AdapterDescriptor,
        base_url: str,
        transcript_root: str | Path,
        *,
        session: Optional[requests.Session] = None,
        max_retries: int = 3,
        backoff_seconds: float = 1.0,
        timeout_s: float = 10.0,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        super().__init__(descriptor)
        self._base_url = base_url.rstrip("/")
        self._root = Path(transcript_root)
        self._session = session or requests.Session()
        self._max_retries = max(0, max_retries)
        self._backoff_s = max(0.0, backoff_seconds)
        self._timeout_s = timeout_s
        self._sleep = sleep

    def fetch(self, region: RegionBoundary, week: date, lookback_weeks: int) -> List[CanonicalFrame]:
        payload = self._get_with_retry(
            f"{self._base_url}/{self.source.value.lower()}",
            {"iso3": region.iso3, "week": week.isoformat(), "lookback_weeks": lookback_weeks},
        )
        path = self.transcribe(payload, region.iso3)
        parser = FixtureAdapter(self.descriptor, self._root)
        return parser.parse_lines(
            path.read_text(encoding="utf-8").splitlines(), region, week, lookback_weeks, origin=str(path)
        )

    def transcribe(self, payload: Any, iso3: str) -> Path:
        """Write the response records as fixture lines so a run can be replayed offline."""
        records = payload.get("records") if isinstance(payload, dict) else payload
        if not isinstance(records, list):
            raise IngestError(f"{self.source.value} response must be a list of records")
        if not records:
            raise SourceUnavailableError(f"{self.source.value} returned no records for {iso3}")
        path = fixture_path(self._root, self.source, iso3)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(canonical_dumps(record) + "\n" for record in records), encoding="utf-8")
        return path

    def _get_with_retry(self, url: str, params: Dict[str, Any]) -> Any:
        attempt = 0
        while True:
            try:
                response = self._session.get(url, params=params, timeout=self._timeout_s)
                if response.status_code == 404:
                    raise SourceUnavailableError(f"{url} returned 404")
                if response.status_code in RETRYABLE_STATUS:
                    raise requests.HTTPError(f"retryable status {response.status_code}", response=response)
                response.raise_for_status()
                return response.json()
            except (requests.ConnectionError, requests.Timeout, requests.HTTPError) as exc:
                status = getattr(getattr(exc, "response", None), "status_code", None)
                if status is not None and status not in RETRYABLE_STATUS:
                    raise IngestError(f"{url} failed with status {status}") from exc
                if attempt >= self._max_retries:
                    raise IngestError(f"{url} failed after {attempt + 1} attempts: {exc}") from exc
                delay = self._backoff_s * (2**attempt)
                LOGGER.warning("Retrying %s in %.1fs (%s)", url, delay, exc)
                self._sleep(delay)
                attempt += 1
            except ValueError as exc:
                raise IngestError(f"{url} returned a non-JSON body") from exc


__all__ = ["HttpSkeletonAdapter", "RETRYABLE_STATUS"]
