"""Structured log lines and persisted run summaries."""

from ceres.logging.structured import StructuredFormatter, configure_logging
from ceres.logging.summaries import load_summary, metrics_summary, persist_summary

__all__ = ["StructuredFormatter", "configure_logging", "load_summary", "metrics_summary", "persist_summary"]
