"""
Archive views: the newest run, per-region history and aggregate stats.
"""
from __future__ import annotations

from fastapi import APIRouter, Depends, Path, Query

from ceres.core.serialization import format_timestamp, hypothesis_to_dict
from ceres.service.dependencies import ServiceState, get_state
from ceres.service.errors import bad_request, not_found
from ceres.service.schemas import ArchiveLatestOut, ArchiveStatsOut, RegionHistoryOut, SnapshotOut
from ceres.store.archive import DEFAULT_HISTORY_LIMIT

router = APIRouter(tags=["archive"])


@router.get("/latest", response_model=ArchiveLatestOut)
def latest_run(state: ServiceState = Depends(get_state)) -> ArchiveLatestOut:
    run, hypotheses = state.archive.latest()
    if run is None:
        raise not_found("no-runs", "no completed run has been archived yet")
    return ArchiveLatestOut(
        run_id=run.run_id,
        run_date=run.run_date,
        run_ts=format_timestamp(run.run_ts),
        config_version=run.config_version,
        hypotheses=[hypothesis_to_dict(h) for h in hypotheses],
    )


@router.get("/regions/{region_id}", response_model=RegionHistoryOut)
def region_history(
    region_id: str = Path(pattern=r"^[A-Z]{3}$"),
    limit: int = Query(DEFAULT_HISTORY_LIMIT),
    state: ServiceState = Depends(get_state),
) -> RegionHistoryOut:
    if limit < 1:
        raise bad_request("limit must be >= 1")
    snapshots = state.archive.region_history(region_id, limit)
    if not snapshots:
        raise not_found("unknown-region", f"no archived snapshots for {region_id}")
    return RegionHistoryOut(
        region_id=region_id,
        limit=limit,
        snapshots=[SnapshotOut.model_validate(s.to_dict()) for s in snapshots],
    )


@router.get("/stats", response_model=ArchiveStatsOut)
def archive_stats(state: ServiceState = Depends(get_state)) -> ArchiveStatsOut:
    return ArchiveStatsOut.model_validate(state.archive.stats())
