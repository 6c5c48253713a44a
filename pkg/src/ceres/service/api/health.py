"""
Liveness plus the last-run timestamp and ledger verification status.
"""
from __future__ import annotations

from fastapi import APIRouter, Depends

from ceres.core.serialization import format_timestamp
from ceres.service.dependencies import ServiceState, get_state
from ceres.service.schemas import HealthOut

router = APIRouter(tags=["health"])


@router.get("/health", response_model=HealthOut)
def health(state: ServiceState = Depends(get_state)) -> HealthOut:
    run = state.archive.latest_run()
    ledgers = {
        "hypotheses": state.hypotheses.verify().to_dict(),
        "grades": state.grades.verify().to_dict(),
    }
    if not all(status["valid"] for status in ledgers.values()):
        status = "degraded"
    elif run is None:
        status = "no-runs-yet"
    else:
        status = "ok"
    return HealthOut(
        status=status,
        last_run_id=run.run_id if run else None,
        last_run_ts=format_timestamp(run.run_ts) if run else None,
        ledgers=ledgers,
    )
