"""One JSON object per log record: ``{stage, region, level, message, logger}``."""

from __future__ import annotations

import json
import logging
import sys
from typing import IO, Optional

STRUCTURED_KEYS = ("stage", "region", "level", "message", "logger")


class StructuredFormatter(logging.Formatter):
    """Renders ``stage`` and ``region`` passed through ``extra=``; both default to null."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "stage": getattr(record, "stage", None),
            "region": getattr(record, "region", None),
            "level": record.levelname,
            "message": record.getMessage(),
            "logger": record.name,
        }
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, sort_keys=False)


def configure_logging(verbose: bool = False, stream: Optional[IO[str]] = None) -> logging.Handler:
    """Install the structured handler on the root logger, replacing earlier ones."""
    level = logging.DEBUG if verbose else logging.INFO
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(StructuredFormatter())
    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)
    if not verbose:
        # Quiet chatty third-party loggers unless explicitly requested.
        for name in ("sqlalchemy", "urllib3", "uvicorn.access"):
            logging.getLogger(name).setLevel(logging.WARNING)
    return handler


__all__ = ["STRUCTURED_KEYS", "StructuredFormatter", "configure_logging"]
