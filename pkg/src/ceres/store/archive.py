"""Run-snapshot archive (Stage 7): one row per region per run, write-once."""

from __future__ import annotations

import json
import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sqlalchemy import func
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import Session

from ceres.core.errors import DuplicateSnapshotError, RunConflictError, UnknownRunError
from ceres.core.serialization import dumps_hypothesis, format_timestamp, loads_hypothesis
from ceres.core.types import FamineHypothesis, rank_hypotheses
from ceres.store.database import create_archive_engine, make_session_factory, session_scope, sqlite_url
from ceres.store.models import RunRow, SnapshotRow

LOGGER = logging.getLogger(__name__)

DEFAULT_HISTORY_LIMIT = 52
COMPLETED = "completed"
FAILED = "failed"


@dataclass(frozen=True)
class RunSnapshot:
    run_id: str
    run_ts: datetime
    region_id: str
    reference_date: date
    p3: float
    p4: float
    p5: float
    interval_low: float
    interval_high: float
    alert_tier: str
    top_drivers: Tuple[str, ...]
    coverage_factor: float
    low_coverage: bool
    hypothesis_id: str
    hypothesis_json: str = field(default="", repr=False)

    @classmethod
    def from_hypothesis(cls, run_id: str, run_ts: datetime, hypothesis: FamineHypothesis) -> "RunSnapshot":
        probability = hypothesis.famine_probability
        return cls(
            run_id=run_id,
            run_ts=run_ts,
            region_id=hypothesis.region_id,
            reference_date=hypothesis.reference_date,
            p3=probability.p3,
            p4=probability.p4,
            p5=probability.p5,
            interval_low=probability.interval_low,
            interval_high=probability.interval_high,
            alert_tier=hypothesis.alert_tier.value,
            top_drivers=tuple(cluster.driver_type.value for cluster in hypothesis.driver_clusters),
            coverage_factor=hypothesis.coverage_factor,
            low_coverage=hypothesis.low_coverage,
            hypothesis_id=hypothesis.hypothesis_id,
            hypothesis_json=dumps_hypothesis(hypothesis),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "run_ts": format_timestamp(self.run_ts),
            "region_id": self.region_id,
            "reference_date": self.reference_date.isoformat(),
            "p_ipc3plus_90d": self.p3,
            "p_ipc4plus_90d": self.p4,
            "p_famine_90d": self.p5,
            "sensitivity_interval_low": self.interval_low,
            "sensitivity_interval_high": self.interval_high,
            "alert_tier": self.alert_tier,
            "top_drivers": list(self.top_drivers),
            "coverage_factor": self.coverage_factor,
            "low_coverage": self.low_coverage,
            "hypothesis_id": self.hypothesis_id,
        }


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    run_date: date
    run_ts: datetime
    config_version: Optional[str]
    status: str
    report: Optional[Dict[str, Any]] = None


def _utc(value: datetime) -> datetime:
    if value.tzinfo is None:
        return value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


def _naive_utc(value: datetime) -> datetime:
    return _utc(value).replace(tzinfo=None)


def _snapshot(row: SnapshotRow) -> RunSnapshot:
    return RunSnapshot(
        run_id=row.run_id,
        run_ts=_utc(row.run_ts),
        region_id=row.region_id,
        reference_date=row.reference_date,
        p3=row.p3,
        p4=row.p4,
        p5=row.p5,
        interval_low=row.interval_low,
        interval_high=row.interval_high,
        alert_tier=row.alert_tier,
        top_drivers=tuple(json.loads(row.top_drivers)),
        coverage_factor=row.coverage_factor,
        low_coverage=bool(row.low_coverage),
        hypothesis_id=row.hypothesis_id,
        hypothesis_json=row.hypothesis_json,
    )


def _live_runs(db: Session):
    return db.query(RunRow).filter(RunRow.status != FAILED)


def _completed_snapshots(db: Session):
    """Snapshots readers may see: only those of runs that finished publishing."""
    return db.query(SnapshotRow).join(RunRow, RunRow.run_id == SnapshotRow.run_id).filter(
        RunRow.status == COMPLETED
    )


def _run(row: RunRow) -> RunRecord:
    return RunRecord(
        run_id=row.run_id,
        run_date=row.run_date,
        run_ts=_utc(row.run_ts),
        config_version=row.config_version,
        status=row.status,
        report=json.loads(row.report_json) if row.report_json else None,
    )


class RunArchive:
    """Single writer, many readers. Each read runs in one session so it sees one run."""

    def __init__(self, database_url: str) -> None:
        self._engine = create_archive_engine(database_url)
        self._sessions = make_session_factory(self._engine)
        self._write_lock = threading.Lock()

    @classmethod
    def from_path(cls, path: str | Path) -> "RunArchive":
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return cls(sqlite_url(path))

    def dispose(self) -> None:
        self._engine.dispose()

    # -- writes ---------------------------------------------------------------

    def begin_run(
        self,
        run_id: str,
        run_date: date,
        run_ts: datetime,
        *,
        config_version: Optional[str] = None,
        allow_same_date: bool = False,
    ) -> RunRecord:
        """Register a run. A second run for the same date needs ``allow_same_date``.

        A run id left behind by an abandoned publish may be registered again.
        """
        with self._write_lock, session_scope(self._sessions) as db:
            existing = db.get(RunRow, run_id)
            if existing is not None and existing.status != FAILED:
                raise RunConflictError(f"run {run_id} already exists")
            if not allow_same_date and _live_runs(db).filter(RunRow.run_date == run_date).first():
                raise RunConflictError(
                    f"a run for {run_date.isoformat()} is already archived; pass a rerun id to issue a new run"
                )
            if existing is not None:
                db.delete(existing)
                db.flush()
            row = RunRow(
                run_id=run_id,
                run_date=run_date,
                run_ts=_naive_utc(run_ts),
                config_version=config_version,
                status="running",
            )
            db.add(row)
            db.commit()
            return _run(row)

    def append_snapshot(self, snapshot: RunSnapshot) -> RunSnapshot:
        return self.append_snapshots([snapshot])[0]

    def append_snapshots(self, snapshots: Sequence[RunSnapshot]) -> List[RunSnapshot]:
        """Store all rows in one transaction; any duplicate (run_id, region) rejects the batch."""
        with self._write_lock, session_scope(self._sessions) as db:
            for snapshot in snapshots:
                if db.get(RunRow, snapshot.run_id) is None:
                    raise UnknownRunError(f"run {snapshot.run_id} was never registered")
                db.add(
                    SnapshotRow(
                        run_id=snapshot.run_id,
                        region_id=snapshot.region_id,
                        run_ts=_naive_utc(snapshot.run_ts),
                        reference_date=snapshot.reference_date,
                        p3=snapshot.p3,
                        p4=snapshot.p4,
                        p5=snapshot.p5,
                        interval_low=snapshot.interval_low,
                        interval_high=snapshot.interval_high,
                        alert_tier=snapshot.alert_tier,
                        top_drivers=json.dumps(list(snapshot.top_drivers)),
                        coverage_factor=snapshot.coverage_factor,
                        low_coverage=snapshot.low_coverage,
                        hypothesis_id=snapshot.hypothesis_id,
                        hypothesis_json=snapshot.hypothesis_json,
                    )
                )
            try:
                db.commit()
            except IntegrityError as exc:
                db.rollback()
                raise DuplicateSnapshotError(f"duplicate (run_id, region) in batch: {exc.orig}") from exc
        LOGGER.info("Archived %d snapshots", len(snapshots), extra={"stage": "publish"})
        return list(snapshots)

    def finish_run(self, run_id: str, status: str, report: Optional[Dict[str, Any]] = None) -> None:
        with self._write_lock, session_scope(self._sessions) as db:
            row = db.get(RunRow, run_id)
            if row is None:
                raise UnknownRunError(f"unknown run {run_id}")
            row.status = status
            row.report_json = json.dumps(report, sort_keys=True) if report is not None else None
            db.commit()

    def abandon_run(self, run_id: str, report: Optional[Dict[str, Any]] = None) -> int:
        """Drop a run's snapshots and mark it failed in one transaction; returns rows removed."""
        with self._write_lock, session_scope(self._sessions) as db:
            row = db.get(RunRow, run_id)
            if row is None:
                raise UnknownRunError(f"unknown run {run_id}")
            removed = db.query(SnapshotRow).filter(SnapshotRow.run_id == run_id).delete(synchronize_session=False)
            row.status = FAILED
            row.report_json = json.dumps(report, sort_keys=True) if report is not None else None
            db.commit()
        LOGGER.warning("Abandoned run %s (%d snapshots removed)", run_id, removed, extra={"stage": "publish"})
        return removed

    # -- reads ----------------------------------------------------------------

    def has_run_for(self, run_date: date) -> bool:
        with session_scope(self._sessions) as db:
            return _live_runs(db).filter(RunRow.run_date == run_date).first() is not None

    def get_run(self, run_id: str) -> RunRecord:
        with session_scope(self._sessions) as db:
            row = db.get(RunRow, run_id)
            if row is None:
                raise UnknownRunError(f"unknown run {run_id}")
            return _run(row)

    def runs(self) -> List[RunRecord]:
        with session_scope(self._sessions) as db:
            rows = db.query(RunRow).order_by(RunRow.run_ts.desc(), RunRow.run_id.desc()).all()
            return [_run(row) for row in rows]

    def latest_run(self) -> Optional[RunRecord]:
        with session_scope(self._sessions) as db:
            row = (
                db.query(RunRow)
                .filter(RunRow.status == COMPLETED)
                .order_by(RunRow.run_ts.desc(), RunRow.run_id.desc())
                .first()
            )
            return _run(row) if row is not None else None

    def run_snapshots(self, run_id: str) -> List[RunSnapshot]:
        with session_scope(self._sessions) as db:
            if db.get(RunRow, run_id) is None:
                raise UnknownRunError(f"unknown run {run_id}")
            rows = db.query(SnapshotRow).filter(SnapshotRow.run_id == run_id).all()
            return [_snapshot(row) for row in rows]

    def run_hypotheses(self, run_id: str) -> List[FamineHypothesis]:
        return rank_hypotheses([loads_hypothesis(s.hypothesis_json) for s in self.run_snapshots(run_id)])

    def latest(self) -> Tuple[Optional[RunRecord], List[FamineHypothesis]]:
        """Newest completed run and its ranked hypotheses, read in one session."""
        with session_scope(self._sessions) as db:
            row = (
                db.query(RunRow)
                .filter(RunRow.status == COMPLETED)
                .order_by(RunRow.run_ts.desc(), RunRow.run_id.desc())
                .first()
            )
            if row is None:
                return None, []
            snapshots = db.query(SnapshotRow).filter(SnapshotRow.run_id == row.run_id).all()
            hypotheses = rank_hypotheses([loads_hypothesis(s.hypothesis_json) for s in snapshots])
            return _run(row), hypotheses

    def region_history(self, region: str, limit: int = DEFAULT_HISTORY_LIMIT) -> List[RunSnapshot]:
        if limit < 1:
            raise ValueError("limit must be >= 1")
        with session_scope(self._sessions) as db:
            rows = (
                _completed_snapshots(db)
                .filter(SnapshotRow.region_id == region)
                .order_by(SnapshotRow.run_ts.desc(), SnapshotRow.id.desc())
                .limit(limit)
                .all()
            )
            return [_snapshot(row) for row in rows]

    def find_hypothesis(self, hypothesis_id: str) -> Optional[FamineHypothesis]:
        with session_scope(self._sessions) as db:
            row = (
                _completed_snapshots(db)
                .filter(SnapshotRow.hypothesis_id == hypothesis_id)
                .order_by(SnapshotRow.run_ts.desc())
                .first()
            )
            return loads_hypothesis(row.hypothesis_json) if row is not None else None

    def stats(self) -> Dict[str, Any]:
        with session_scope(self._sessions) as db:
            runs = db.query(func.count(RunRow.run_id)).scalar() or 0
            snapshots = db.query(func.count(SnapshotRow.id)).scalar() or 0
            regions = db.query(func.count(func.distinct(SnapshotRow.region_id))).scalar() or 0
            first_ts, last_ts = db.query(func.min(RunRow.run_ts), func.max(RunRow.run_ts)).one()
            newest = (
                db.query(RunRow)
                .filter(RunRow.status == COMPLETED)
                .order_by(RunRow.run_ts.desc(), RunRow.run_id.desc())
                .first()
            )
            tiers: Counter = Counter()
            low_coverage = 0
            if newest is not None:
                for row in db.query(SnapshotRow).filter(SnapshotRow.run_id == newest.run_id):
                    tiers[row.alert_tier] += 1
                    low_coverage += int(bool(row.low_coverage))
            return {
                "runs": int(runs),
                "snapshots": int(snapshots),
                "regions": int(regions),
                "first_run_ts": format_timestamp(_utc(first_ts)) if first_ts else None,
                "last_run_ts": format_timestamp(_utc(last_ts)) if last_ts else None,
                "latest_run_id": newest.run_id if newest is not None else None,
                "latest_tier_counts": dict(sorted(tiers.items())),
                "latest_low_coverage": low_coverage,
            }

    def export_rows(self, writer: Callable[[Dict[str, Any]], None]) -> int:
        """Stream every snapshot row as a dict; the columnar format is the caller's concern."""
        count = 0
        with session_scope(self._sessions) as db:
            query = db.query(SnapshotRow).order_by(SnapshotRow.run_ts, SnapshotRow.region_id)
            for row in query.yield_per(500):
                writer(_snapshot(row).to_dict())
                count += 1
        return count


__all__ = ["COMPLETED", "DEFAULT_HISTORY_LIMIT", "FAILED", "RunArchive", "RunRecord", "RunSnapshot"]
