"""Exception hierarchy shared across pipeline stages."""

from __future__ import annotations

from typing import Optional


class CeresError(Exception):
    """Base class for every error raised by the pipeline."""


class ConfigError(CeresError, ValueError):
    """Raised when a configuration file fails validation."""


class DuplicateAdapterError(CeresError):
    """Raised when a second adapter is registered for the same source."""


class SourceUnavailableError(CeresError):
    """A source has no data for a region; recorded in the availability mask."""


class IngestError(CeresError):
    """Malformed upstream payload. Fatal for the run (Stages 1-2)."""


class OutOfBoundsError(CeresError):
    """A regrid target cell lies outside the source raster hull."""

    def __init__(self, message: str, cells: Optional[list] = None) -> None:
        super().__init__(message)
        self.cells = list(cells or [])


class SignalUnavailableError(CeresError):
    """A stress signal cannot be computed from the inputs at hand."""


class RegionSkipped(CeresError):
    """A region is dropped for the current week; the reason is logged and reported."""


class HypothesisValidationError(CeresError):
    """Raised when an assembled hypothesis violates its invariants."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class EarlyGradingError(CeresError):
    """Grading was attempted before the forecast horizon."""


class AlreadyGradedError(CeresError):
    """A hypothesis id already has a grade entry in the write-once ledger."""


class LedgerTamperError(CeresError):
    """Ledger hash-chain verification failed."""

    def __init__(self, message: str, first_bad_sequence: Optional[int] = None) -> None:
        super().__init__(message)
        self.first_bad_sequence = first_bad_sequence


class DuplicateSnapshotError(CeresError):
    """A (run_id, region) snapshot row already exists."""


class RunConflictError(CeresError):
    """A run for the requested date already exists in the archive."""


class UnknownRunError(CeresError):
    """No archived run matches the requested id."""


class MetricUndefinedError(CeresError):
    """A verification metric has an empty or zero denominator."""


class CrpsDataError(CeresError):
    """The phase pmf derived from a probability vector has a negative cell."""


__all__ = [
    "AlreadyGradedError",
    "CeresError",
    "ConfigError",
    "CrpsDataError",
    "DuplicateAdapterError",
    "DuplicateSnapshotError",
    "EarlyGradingError",
    "HypothesisValidationError",
    "IngestError",
    "LedgerTamperError",
    "MetricUndefinedError",
    "OutOfBoundsError",
    "RegionSkipped",
    "RunConflictError",
    "SignalUnavailableError",
    "SourceUnavailableError",
    "UnknownRunError",
]
