"""Weekly pipeline orchestration, grading runs and historical backtests."""

from ceres.pipeline.backtest import BacktestCase, BacktestReport, load_cases, run_backtest, select_cases
from ceres.pipeline.grading import GradingSummary, fixture_report_source, grade_due, issued_alerts, track_record
from ceres.pipeline.runner import (
    PipelineResources,
    PipelineRunReport,
    PipelineRunner,
    RegionOutcome,
    Stage,
    StageStatus,
    build_default_runner,
    build_registry,
    load_resources,
    run_id_for,
)

__all__ = [
    "BacktestCase",
    "BacktestReport",
    "GradingSummary",
    "PipelineResources",
    "PipelineRunReport",
    "PipelineRunner",
    "RegionOutcome",
    "Stage",
    "StageStatus",
    "build_default_runner",
    "build_registry",
    "fixture_report_source",
    "grade_due",
    "issued_alerts",
    "load_cases",
    "load_resources",
    "run_backtest",
    "run_id_for",
    "select_cases",
    "track_record",
]
