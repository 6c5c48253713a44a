"""CERES operator CLI: run the weekly pipeline, backtest, grade, and report."""

from __future__ import annotations

import argparse
import json
import logging
from dataclasses import dataclass
from datetime import date
from typing import Optional, Sequence

from ceres.cli._helpers import (
    EXIT_FATAL,
    EXIT_OK,
    EXIT_USAGE,
    add_common_args,
    configure_logging,
    iso_date,
    load_cli_config,
)
from ceres.config.loader import PipelineConfig
from ceres.core.errors import CeresError, LedgerTamperError, RunConflictError, UnknownRunError
from ceres.logging.summaries import metrics_summary, persist_summary
from ceres.pipeline.backtest import ALL_CASES, load_cases, run_backtest, select_cases
from ceres.pipeline.digest import digest_dict, render_digest
from ceres.pipeline.grading import fixture_report_source, grade_due, track_record
from ceres.pipeline.runner import build_default_runner
from ceres.scoring.model import load_coefficients
from ceres.store.archive import RunArchive
from ceres.store.ledger import GradeLedger, HypothesisLedger

LOGGER = logging.getLogger(__name__)

BACKTEST_CASES = ("somalia-2011", "south-sudan-2017", "tigray-2022", "yemen-2021", ALL_CASES)


@dataclass
class RunArgs:
    date: date
    rerun_id: Optional[str]


@dataclass
class BacktestArgs:
    case: str
    as_json: bool


@dataclass
class GradeArgs:
    as_of: date


@dataclass
class ReportArgs:
    run_id: str
    as_json: bool


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceres",
        description="Weekly famine early-warning pipeline: run, backtest, grade and report.",
    )
    add_common_args(parser)
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Execute the seven-stage pipeline for one ISO week")
    run.add_argument("--date", required=True, type=iso_date, help="Reference date (snapped back to Monday)")
    run.add_argument(
        "--rerun-id",
        default=None,
        help="Issue a new run for a date that is already archived under this run id",
    )

    backtest = subparsers.add_parser("backtest", help="Score the historical back-validation cases")
    backtest.add_argument("--case", required=True, choices=BACKTEST_CASES, help="Case name or 'all'")
    backtest.add_argument("--json", dest="as_json", action="store_true", help="Emit JSON instead of a table")

    grade = subparsers.add_parser("grade", help="Grade every hypothesis resolvable as of a date")
    grade.add_argument("--as-of", required=True, type=iso_date, help="Grading date (YYYY-MM-DD)")

    report = subparsers.add_parser("report", help="Print the ranked digest of an archived run")
    report.add_argument("--run", dest="run_id", required=True, help="Run identifier")
    report.add_argument("--json", dest="as_json", action="store_true", help="Emit JSON instead of text")

    return parser


def _handle_run(config: PipelineConfig, args: RunArgs) -> int:
    runner = build_default_runner(config)
    try:
        report = runner.run(args.date, rerun_id=args.rerun_id)
    except RunConflictError as exc:
        LOGGER.error("%s", exc, extra={"stage": "run"})
        return EXIT_USAGE
    finally:
        runner.archive.dispose()
    print(json.dumps(report.to_dict(), indent=2))
    if report.fatal or report.error:
        return EXIT_FATAL
    return EXIT_OK


def _handle_backtest(config: PipelineConfig, args: BacktestArgs) -> int:
    if config.paths.backtest_cases is None:
        LOGGER.error("paths.backtest_cases is not configured", extra={"stage": "backtest"})
        return EXIT_USAGE
    cases = load_cases(config.paths.backtest_cases)
    try:
        selected = select_cases(cases, args.case)
    except KeyError:
        LOGGER.error("Unknown backtest case %r", args.case, extra={"stage": "backtest"})
        return EXIT_USAGE
    report = run_backtest(
        selected,
        table=load_coefficients(config.paths.coefficients_path),
        bounds=config.monotonicity,
        perturbation=config.perturbation,
        tiers=config.tiers,
        coverage_rule=config.coverage_rule,
    )
    print(json.dumps(report.to_dict(), indent=2) if args.as_json else report.render())
    return EXIT_OK


def _handle_grade(config: PipelineConfig, args: GradeArgs) -> int:
    hypotheses = HypothesisLedger(config.paths.hypothesis_ledger)
    grades = GradeLedger(config.paths.grading_ledger)
    try:
        summary = grade_due(hypotheses, grades, fixture_report_source(config.paths.fixture_root), as_of=args.as_of)
    except LedgerTamperError as exc:
        LOGGER.error("%s (first bad sequence %s)", exc, exc.first_bad_sequence, extra={"stage": "grade"})
        return EXIT_FATAL
    snapshot = track_record(hypotheses, grades, config.coverage_rule)
    persist_summary(metrics_summary(snapshot), config.paths.output_root / "metrics.json")
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def _handle_report(config: PipelineConfig, args: ReportArgs) -> int:
    archive = RunArchive.from_path(config.paths.archive_path)
    try:
        run = archive.get_run(args.run_id)
        hypotheses = archive.run_hypotheses(args.run_id)
    except UnknownRunError as exc:
        LOGGER.error("%s", exc, extra={"stage": "report"})
        return EXIT_FATAL
    finally:
        archive.dispose()
    if args.as_json:
        print(json.dumps(digest_dict(run, hypotheses), indent=2))
    else:
        print(render_digest(run, hypotheses))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    config = load_cli_config(args.config)
    LOGGER.info("Config loaded (version=%s)", config.config_version, extra={"stage": "config"})

    try:
        if args.command == "run":
            return _handle_run(config, RunArgs(date=args.date, rerun_id=args.rerun_id))
        if args.command == "backtest":
            return _handle_backtest(config, BacktestArgs(case=args.case, as_json=args.as_json))
        if args.command == "grade":
            return _handle_grade(config, GradeArgs(as_of=args.as_of))
        if args.command == "report":
            return _handle_report(config, ReportArgs(run_id=args.run_id, as_json=args.as_json))
    except CeresError as exc:
        LOGGER.error("%s failed: %s", args.command, exc, extra={"stage": args.command})
        return EXIT_FATAL
    parser.error(f"Unknown command: {args.command}")  # pragma: no cover
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
