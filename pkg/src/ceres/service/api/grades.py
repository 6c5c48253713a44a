"""
Grading ledger entries and the verification metric snapshot.
"""
from __future__ import annotations

from fastapi import APIRouter, Depends, Query

from ceres.logging.summaries import metrics_summary
from ceres.pipeline.grading import track_record
from ceres.service.dependencies import ServiceState, get_state
from ceres.service.errors import bad_request
from ceres.service.schemas import GradeOut, GradesPageOut, MetricsOut
from ceres.store.ledger import GRADE_KIND

DEFAULT_PAGE_SIZE = 100
MAX_PAGE_SIZE = 1000

router = APIRouter(tags=["grades"])


@router.get("", response_model=GradesPageOut)
def list_grades(
    after: int = Query(0, description="Return entries with a sequence number above this cursor"),
    limit: int = Query(DEFAULT_PAGE_SIZE),
    state: ServiceState = Depends(get_state),
) -> GradesPageOut:
    """Ledger entries in sequence order, paged by sequence-number cursor."""
    if after < 0:
        raise bad_request("after must be >= 0")
    if not 1 <= limit <= MAX_PAGE_SIZE:
        raise bad_request(f"limit must be within [1, {MAX_PAGE_SIZE}]")
    entries = [e for e in state.grades.entries() if e.kind == GRADE_KIND and e.sequence > after]
    page = entries[:limit]
    grades = [
        GradeOut.model_validate(
            {"sequence": e.sequence, **e.payload, "prev_hash": e.prev_hash, "entry_hash": e.entry_hash}
        )
        for e in page
    ]
    next_cursor = page[-1].sequence if len(entries) > limit else None
    return GradesPageOut(grades=grades, next_cursor=next_cursor)


@router.get("/metrics", response_model=MetricsOut)
def grade_metrics(state: ServiceState = Depends(get_state)) -> MetricsOut:
    """Every metric with its sample size; unmet minimums are marked, never dropped."""
    snapshot = track_record(state.hypotheses, state.grades, state.coverage_rule)
    return MetricsOut.model_validate(metrics_summary(snapshot))
