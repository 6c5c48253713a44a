"""T+90 grading of issued hypotheses against IPC outcome reports."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ceres.core.errors import EarlyGradingError, IngestError
from ceres.core.serialization import format_timestamp, parse_timestamp, quantize
from ceres.core.types import AlertTier, FamineHypothesis, IpcPhase

LOGGER = logging.getLogger(__name__)

GRADING_WINDOW_DAYS = 30

IpcReport = Tuple[date, int]


class GradeStatus(str, Enum):
    GRADED = "graded"
    UNGRADABLE = "ungradable"


@dataclass(frozen=True)
class Outcome:
    """Observed IPC phase near the horizon; ``o3``/``o4``/``o5`` are phase exceedances."""

    region: str
    horizon_date: date
    observed_phase: Optional[int] = None
    report_date: Optional[date] = None

    def __post_init__(self) -> None:
        if (self.observed_phase is None) != (self.report_date is None):
            raise ValueError("observed_phase and report_date must be given together")
        if self.observed_phase is not None:
            IpcPhase(self.observed_phase)
            if abs((self.report_date - self.horizon_date).days) > GRADING_WINDOW_DAYS:
                raise ValueError(
                    f"report {self.report_date} is outside the +/-{GRADING_WINDOW_DAYS} day window"
                )

    @property
    def gradable(self) -> bool:
        return self.observed_phase is not None

    def exceeds(self, phase: int) -> Optional[int]:
        if self.observed_phase is None:
            return None
        return int(self.observed_phase >= phase)

    @property
    def o3(self) -> Optional[int]:
        return self.exceeds(3)

    @property
    def o4(self) -> Optional[int]:
        return self.exceeds(4)

    @property
    def o5(self) -> Optional[int]:
        return self.exceeds(5)


@dataclass(frozen=True)
class GradeRecord:
    """One ledger payload. Hash fields are filled in once the ledger accepts it."""

    hypothesis_id: str
    region: str
    reference_date: date
    alert_tier: AlertTier
    p3: float
    p4: float
    p5: float
    interval_low: float
    interval_high: float
    outcome: Outcome
    brier3: Optional[float]
    graded_at: datetime
    status: GradeStatus = GradeStatus.GRADED
    prev_hash: str = ""
    entry_hash: str = ""

    @property
    def gradable(self) -> bool:
        return self.status is GradeStatus.GRADED

    def to_payload(self) -> Dict[str, Any]:
        """Canonical ledger body; excludes the chain fields the ledger owns."""
        outcome = self.outcome
        return {
            "hypothesis_id": self.hypothesis_id,
            "region": self.region,
            "reference_date": self.reference_date.isoformat(),
            "alert_tier": self.alert_tier.value,
            "forecast": {
                "p3": self.p3,
                "p4": self.p4,
                "p5": self.p5,
                "interval_low": self.interval_low,
                "interval_high": self.interval_high,
            },
            "outcome": {
                "horizon_date": outcome.horizon_date.isoformat(),
                "observed_phase": outcome.observed_phase,
                "report_date": outcome.report_date.isoformat() if outcome.report_date else None,
                "o3": outcome.o3,
                "o4": outcome.o4,
                "o5": outcome.o5,
            },
            "brier3": self.brier3,
            "status": self.status.value,
            "graded_at": format_timestamp(self.graded_at),
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any], *, prev_hash: str = "", entry_hash: str = "") -> "GradeRecord":
        forecast = payload["forecast"]
        outcome = payload["outcome"]
        report_date = outcome.get("report_date")
        return cls(
            hypothesis_id=payload["hypothesis_id"],
            region=payload["region"],
            reference_date=date.fromisoformat(payload["reference_date"]),
            alert_tier=AlertTier(payload["alert_tier"]),
            p3=float(forecast["p3"]),
            p4=float(forecast["p4"]),
            p5=float(forecast["p5"]),
            interval_low=float(forecast["interval_low"]),
            interval_high=float(forecast["interval_high"]),
            outcome=Outcome(
                region=payload["region"],
                horizon_date=date.fromisoformat(outcome["horizon_date"]),
                observed_phase=outcome.get("observed_phase"),
                report_date=date.fromisoformat(report_date) if report_date else None,
            ),
            brier3=None if payload.get("brier3") is None else float(payload["brier3"]),
            graded_at=parse_timestamp(payload["graded_at"]),
            status=GradeStatus(payload["status"]),
            prev_hash=prev_hash,
            entry_hash=entry_hash,
        )


def horizon_of(hypothesis: FamineHypothesis) -> date:
    return hypothesis.reference_date + timedelta(days=hypothesis.forecast_horizon_days)


def select_report(
    horizon: date,
    reports: Iterable[IpcReport],
    as_of: Optional[date] = None,
) -> Optional[IpcReport]:
    """Latest report dated within the window around ``horizon`` and on or before ``as_of``."""
    window = timedelta(days=GRADING_WINDOW_DAYS)
    eligible = [
        (report_date, phase)
        for report_date, phase in reports
        if abs(report_date - horizon) <= window and (as_of is None or report_date <= as_of)
    ]
    if not eligible:
        return None
    return max(eligible, key=lambda item: item[0])


def grade_hypothesis(
    hypothesis: FamineHypothesis,
    ipc_reports: Sequence[IpcReport],
    *,
    as_of: date,
    graded_at: Optional[datetime] = None,
) -> Optional[GradeRecord]:
    """Grade one hypothesis as of ``as_of``.

    Returns ``None`` while the window is still open and has no report yet, and an
    ungradable record once it has closed empty.
    """
    horizon = horizon_of(hypothesis)
    if as_of < horizon:
        raise EarlyGradingError(
            f"{hypothesis.hypothesis_id} cannot be graded before its horizon {horizon.isoformat()}"
        )
    selected = select_report(horizon, ipc_reports, as_of)
    if selected is None and as_of <= horizon + timedelta(days=GRADING_WINDOW_DAYS):
        return None

    stamp = graded_at or datetime.combine(as_of, datetime.min.time(), tzinfo=timezone.utc)
    probability = hypothesis.famine_probability
    if selected is None:
        outcome = Outcome(region=hypothesis.region_id, horizon_date=horizon)
        status = GradeStatus.UNGRADABLE
        brier = None
        LOGGER.warning(
            "No IPC report within %d days of %s for %s; recorded ungradable",
            GRADING_WINDOW_DAYS,
            horizon.isoformat(),
            hypothesis.hypothesis_id,
            extra={"stage": "grade", "region": hypothesis.region_id},
        )
    else:
        report_date, phase = selected
        outcome = Outcome(
            region=hypothesis.region_id,
            horizon_date=horizon,
            observed_phase=int(phase),
            report_date=report_date,
        )
        status = GradeStatus.GRADED
        brier = quantize((probability.p3 - outcome.o3) ** 2)
    return GradeRecord(
        hypothesis_id=hypothesis.hypothesis_id,
        region=hypothesis.region_id,
        reference_date=hypothesis.reference_date,
        alert_tier=hypothesis.alert_tier,
        p3=probability.p3,
        p4=probability.p4,
        p5=probability.p5,
        interval_low=probability.interval_low,
        interval_high=probability.interval_high,
        outcome=outcome,
        brier3=brier,
        graded_at=stamp,
        status=status,
    )


def load_ipc_reports(lines: Iterable[str], origin: str = "<memory>") -> List[IpcReport]:
    """Parse IPC fixture lines (``{"date": ..., "phase": ...}``) into outcome reports."""
    reports: List[IpcReport] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            reports.append((date.fromisoformat(record["date"]), int(IpcPhase(record["phase"]))))
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"{origin}:{lineno}: malformed IPC report ({exc})") from exc
    return reports


__all__ = [
    "GRADING_WINDOW_DAYS",
    "GradeRecord",
    "GradeStatus",
    "IpcReport",
    "Outcome",
    "grade_hypothesis",
    "horizon_of",
    "load_ipc_reports",
    "select_report",
]
