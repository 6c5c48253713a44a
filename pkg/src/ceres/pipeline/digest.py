"""Plain-text and JSON digests of an archived run."""

from __future__ import annotations

from typing import Any, Dict, List, Sequence

from ceres.core.serialization import format_timestamp, hypothesis_to_dict
from ceres.core.types import AlertTier, FamineHypothesis, rank_hypotheses
from ceres.store.archive import RunRecord


def digest_dict(run: RunRecord, hypotheses: Sequence[FamineHypothesis]) -> Dict[str, Any]:
    ranked = rank_hypotheses(hypotheses)
    return {
        "run_id": run.run_id,
        "run_date": run.run_date.isoformat(),
        "run_ts": format_timestamp(run.run_ts),
        "status": run.status,
        "config_version": run.config_version,
        "hypotheses": [hypothesis_to_dict(h) for h in ranked],
    }


def render_digest(run: RunRecord, hypotheses: Sequence[FamineHypothesis]) -> str:
    ranked = rank_hypotheses(hypotheses)
    lines: List[str] = [
        f"CERES run {run.run_id} ({run.run_date.isoformat()}, {run.status})",
        f"{len(ranked)} hypotheses",
    ]
    if not ranked:
        lines.append("No hypotheses were issued in this run.")
        return "\n".join(lines)
    for tier in AlertTier:
        section = [h for h in ranked if h.alert_tier is tier]
        if not section:
            continue
        lines.append("")
        lines.append(f"== {tier.value} ({len(section)}) ==")
        for h in section:
            pv = h.famine_probability
            drivers = ", ".join(f"{d.driver_type.value} {d.intensity:.2f}" for d in h.driver_clusters) or "none"
            lines.append(
                f"{h.region_id} {h.region_name}: P3 {pv.p3:.3f} P4 {pv.p4:.3f} P5 {pv.p5:.3f} "
                f"[{pv.interval_low:.3f}, {pv.interval_high:.3f}] {pv.interval_type}"
            )
            lines.append(f"    drivers: {drivers}; forecast phase {h.ipc_phase_forecast}; id {h.hypothesis_id}")
            if h.notes:
                lines.append(f"    notes: {', '.join(h.notes)}")
    return "\n".join(lines)


__all__ = ["digest_dict", "render_digest"]
