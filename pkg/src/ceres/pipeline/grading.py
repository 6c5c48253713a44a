"""Grade every issued hypothesis whose outcome window is resolvable."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from ceres.core.errors import EarlyGradingError, LedgerTamperError
from ceres.core.types import SourceId
from ceres.ingestion.adapters import fixture_path
from ceres.store.ledger import GradeLedger, HypothesisLedger
from ceres.verification.grading import GradeStatus, IpcReport, grade_hypothesis, load_ipc_reports
from ceres.verification.metrics import CoverageRule, IssuedAlert, metrics_snapshot

LOGGER = logging.getLogger(__name__)

ReportSource = Callable[[str], Sequence[IpcReport]]


@dataclass
class GradingSummary:
    as_of: date
    graded: List[str] = field(default_factory=list)
    ungradable: List[str] = field(default_factory=list)
    pending: List[str] = field(default_factory=list)
    not_due: int = 0
    already_graded: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "as_of": self.as_of.isoformat(),
            "graded": len(self.graded),
            "ungradable": len(self.ungradable),
            "pending": len(self.pending),
            "not_due": self.not_due,
            "already_graded": self.already_graded,
        }


def fixture_report_source(fixture_root: str | Path) -> ReportSource:
    """IPC outcome reports read from the fixture tree; a missing file means no reports yet."""
    root = Path(fixture_root)

    def reports(iso3: str) -> List[IpcReport]:
        path = fixture_path(root, SourceId.IPC, iso3)
        if not path.exists():
            return []
        return load_ipc_reports(path.read_text(encoding="utf-8").splitlines(), origin=str(path))

    return reports


def grade_due(
    hypotheses: HypothesisLedger,
    grades: GradeLedger,
    reports: ReportSource,
    *,
    as_of: date,
    graded_at: Optional[datetime] = None,
) -> GradingSummary:
    """Append one grade per resolvable hypothesis; both ledgers are verified first."""
    for ledger in (hypotheses, grades):
        result = ledger.verify()
        if not result.valid:
            raise LedgerTamperError(
                f"{ledger.path} failed verification ({result.reason}); grading aborted",
                result.first_bad_sequence,
            )

    summary = GradingSummary(as_of=as_of)
    done = grades.graded_ids()
    cache: Dict[str, Sequence[IpcReport]] = {}
    for hypothesis in hypotheses.hypotheses():
        if hypothesis.hypothesis_id in done:
            summary.already_graded += 1
            continue
        region = hypothesis.region_id
        if region not in cache:
            cache[region] = reports(region)
        try:
            record = grade_hypothesis(hypothesis, cache[region], as_of=as_of, graded_at=graded_at)
        except EarlyGradingError:
            summary.not_due += 1
            continue
        if record is None:
            summary.pending.append(hypothesis.hypothesis_id)
            continue
        grades.record_grade(record)
        done.add(hypothesis.hypothesis_id)
        target = summary.graded if record.status is GradeStatus.GRADED else summary.ungradable
        target.append(hypothesis.hypothesis_id)
    LOGGER.info(
        "Grading as of %s: %d graded, %d ungradable, %d pending, %d not yet due",
        as_of.isoformat(),
        len(summary.graded),
        len(summary.ungradable),
        len(summary.pending),
        summary.not_due,
        extra={"stage": "grade"},
    )
    return summary


def issued_alerts(hypotheses: HypothesisLedger) -> List[IssuedAlert]:
    return [(h.region_id, h.reference_date, h.alert_tier) for h in hypotheses.hypotheses()]


def track_record(
    hypotheses: HypothesisLedger,
    grades: GradeLedger,
    coverage_rule: CoverageRule = CoverageRule.LITERAL,
) -> Dict[str, object]:
    """Metric snapshot over every ledgered grade, recall measured against all issued alerts."""
    return metrics_snapshot(grades.records(), issued=issued_alerts(hypotheses), coverage_rule=coverage_rule)


__all__ = ["GradingSummary", "ReportSource", "fixture_report_source", "grade_due", "issued_alerts", "track_record"]
