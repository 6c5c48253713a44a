"""Persist run reports and metric snapshots as JSON files next to run outputs."""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

LOGGER = logging.getLogger(__name__)
_SUMMARY_VERSION = "1.0.0"


def persist_summary(summary: Mapping[str, Any], output_path: Path) -> Path:
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(json.dumps(summary, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    LOGGER.info("Wrote summary to %s", output_path)
    return output_path


def metrics_summary(snapshot: Mapping[str, Any], generated_at: Optional[datetime] = None) -> Dict[str, Any]:
    stamp = (generated_at or datetime.now(timezone.utc)).strftime("%Y-%m-%dT%H:%M:%SZ")
    return {"summary_version": _SUMMARY_VERSION, "generated_ts": stamp, **snapshot}


def load_summary(path: Path) -> Optional[Dict[str, Any]]:
    if not path.exists():
        LOGGER.warning("Summary %s not found", path)
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        LOGGER.warning("Skipping unreadable summary %s: %s", path, exc)
        return None


__all__ = ["load_summary", "metrics_summary", "persist_summary"]
