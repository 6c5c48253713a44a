"""Monday-anchored weekly alignment with forward fill."""

from __future__ import annotations

import math
from datetime import date, timedelta
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ceres.ingestion.frames import CanonicalFrame, Variable


def week_range(start: date, end: date) -> pd.DatetimeIndex:
    return pd.date_range(pd.Timestamp(start), pd.Timestamp(end), freq="W-MON")


def align_weekly(frames: Sequence[CanonicalFrame], start: date, end: date) -> pd.Series:
    """One value per Monday in [start, end], carried forward from the latest prior frame.

    Weeks before the first frame stay NaN; nothing is back-filled.
    """
    weeks = week_range(start, end)
    if not frames:
        return pd.Series(np.nan, index=weeks, dtype=float)
    ordered = sorted(frames, key=lambda frame: (frame.week, frame.metadata.observed_on))
    series = pd.Series(
        [frame.value for frame in ordered],
        index=pd.DatetimeIndex([pd.Timestamp(frame.week) for frame in ordered]),
        dtype=float,
    )
    series = series[~series.index.duplicated(keep="last")]
    return series.reindex(series.index.union(weeks)).sort_index().ffill().reindex(weeks)


def group_by_variable(frames: Iterable[CanonicalFrame]) -> Dict[Variable, List[CanonicalFrame]]:
    grouped: Dict[Variable, List[CanonicalFrame]] = {}
    for frame in frames:
        grouped.setdefault(frame.variable, []).append(frame)
    return grouped


def weekly_observations(
    frames: Iterable[CanonicalFrame],
    week: date,
    lookback_weeks: int,
) -> Dict[str, Optional[float]]:
    """Latest aligned value of every variable as of ``week``; absent variables map to None."""
    start = week - timedelta(weeks=lookback_weeks)
    grouped = group_by_variable(frames)
    observations: Dict[str, Optional[float]] = {}
    for variable in Variable:
        series = align_weekly(grouped.get(variable, []), start, week)
        latest = float(series.iloc[-1]) if len(series) else math.nan
        observations[variable.value] = None if math.isnan(latest) else latest
    return observations


__all__ = ["align_weekly", "group_by_variable", "week_range", "weekly_observations"]
