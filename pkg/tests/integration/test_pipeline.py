from __future__ import annotations

import json
import time
from datetime import date
from pathlib import Path
from typing import Dict

import pytest

from ceres.config.loader import load_config
from ceres.core.errors import RunConflictError
from ceres.core.serialization import loads_hypothesis
from ceres.core.types import SourceId, rank_hypotheses
from ceres.core.validation import validate_hypothesis
from ceres.ingestion.corpus import CorpusSpec, write_corpus
from ceres.ingestion.spatial import RegionBoundary
from ceres.pipeline.runner import PipelineRunner, PipelineRunReport, Stage, StageStatus
from tests.helpers import (
    REFERENCE_MONDAY,
    RUN_TS,
    TEST_REGIONS,
    TEST_SEVERITY,
    config_dict,
    load_golden,
    write_config,
)


def _published(report: PipelineRunReport) -> list:
    text = (report.output_dir / "hypotheses.json").read_text(encoding="utf-8")
    return [loads_hypothesis(json.dumps(item)) for item in json.loads(text)]


def test_run_publishes_ranked_valid_hypotheses(published_run: PipelineRunReport, pipeline_config) -> None:
    report = published_run
    assert report.run_id == "run-20260302"
    assert not report.fatal
    assert report.error is None
    assert all(status is StageStatus.OK for status in report.stages.values())
    assert report.scored == sorted(TEST_REGIONS)
    assert report.output_dir == pipeline_config.paths.output_root / "2026-03-02"

    hypotheses = _published(report)
    assert hypotheses == rank_hypotheses(hypotheses)
    assert {h.region_id for h in hypotheses} == set(TEST_REGIONS)
    for hypothesis in hypotheses:
        assert validate_hypothesis(hypothesis) == []
        assert hypothesis.created_at.isoformat() == "2026-03-02T06:00:00+00:00"
        assert (report.output_dir / f"{hypothesis.region_id}.json").exists()
        assert hypothesis.alert_tier is pipeline_config.tiers.classify(
            hypothesis.p3, hypothesis.p4, hypothesis.convergence_tier, hypothesis.composite_stress_score
        )

    by_region = {h.region_id: h for h in hypotheses}
    assert by_region["SOM"].composite_stress_score > by_region["YEM"].composite_stress_score
    assert by_region["SOM"].famine_probability.p3 > by_region["YEM"].famine_probability.p3


def test_run_report_layout(published_run: PipelineRunReport) -> None:
    golden = load_golden("run_report_keys.json")
    payload = json.loads((published_run.output_dir / "run_report.json").read_text(encoding="utf-8"))
    assert list(payload) == golden["report"]
    assert list(payload["stages"]) == golden["stages"]
    assert payload["status"] == "completed"
    assert payload["run_ts"] == "2026-03-02T06:30:00Z"
    for region in payload["regions"].values():
        assert list(region) == golden["region"]


def test_run_is_archived_and_ledgered(runner: PipelineRunner, published_run: PipelineRunReport) -> None:
    record, hypotheses = runner.archive.latest()
    assert record.run_id == published_run.run_id
    assert record.status == "completed"
    assert record.report["scored"] == len(TEST_REGIONS)
    assert hypotheses == _published(published_run)

    assert runner.ledger.verify().valid
    assert [h.hypothesis_id for h in runner.ledger.hypotheses()] == [h.hypothesis_id for h in hypotheses]


def test_same_date_needs_a_rerun_id(runner: PipelineRunner, published_run: PipelineRunReport) -> None:
    with pytest.raises(RunConflictError):
        runner.run(REFERENCE_MONDAY)

    rerun = runner.run(REFERENCE_MONDAY, rerun_id="rerun-a")
    assert rerun.run_id == "rerun-a"
    assert rerun.output_dir.name == "2026-03-02-rerun-a"
    # Content-addressed ids: identical inputs mint identical hypotheses.
    assert _published(rerun) == _published(published_run)
    assert len(runner.archive.runs()) == 2
    assert len(runner.ledger) == 2 * len(TEST_REGIONS)

    with pytest.raises(RunConflictError):
        runner.run(REFERENCE_MONDAY, rerun_id="rerun-a")


def test_non_monday_dates_snap_back(runner: PipelineRunner) -> None:
    report = runner.run(date(2026, 3, 4))
    assert report.run_date == REFERENCE_MONDAY
    assert report.run_id == "run-20260302"


def test_runs_are_byte_identical_across_workspaces(
    tmp_path: Path, boundaries: Dict[str, RegionBoundary]
) -> None:
    outputs = []
    for name in ("first", "second"):
        root = tmp_path / name
        spec = CorpusSpec(end=REFERENCE_MONDAY, severity=dict(TEST_SEVERITY))
        write_corpus(root / "corpus", boundaries, spec, only=TEST_REGIONS)
        config = load_config(write_config(root, config_dict(root)))
        runner = PipelineRunner(config, clock=lambda: RUN_TS)
        report = runner.run(REFERENCE_MONDAY)
        runner.archive.dispose()
        outputs.append((report.output_dir / "hypotheses.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_missing_sources_lower_coverage_and_empty_regions_are_skipped(
    tmp_path: Path, boundaries: Dict[str, RegionBoundary]
) -> None:
    missing = {"YEM": [SourceId.ACLED, SourceId.WFP_FCS, SourceId.PRICE_INDEX, SourceId.CHIRPS]}
    spec = CorpusSpec(end=REFERENCE_MONDAY, severity=dict(TEST_SEVERITY), missing=missing)
    write_corpus(tmp_path / "corpus", boundaries, spec, only=TEST_REGIONS)
    config = load_config(write_config(tmp_path, config_dict(tmp_path, regions=TEST_REGIONS + ("KEN",))))
    runner = PipelineRunner(config, clock=lambda: RUN_TS)
    report = runner.run(REFERENCE_MONDAY)
    runner.archive.dispose()

    assert not report.fatal
    assert report.skipped == ["KEN"]
    assert report.regions["KEN"].failed_stage is Stage.SIGNALS
    assert report.stages[Stage.SIGNALS] is StageStatus.PARTIAL
    assert report.regions["YEM"].low_coverage

    yemen = {h.region_id: h for h in _published(report)}["YEM"]
    assert yemen.low_coverage
    assert yemen.coverage_factor < 0.5
    assert any("coverage" in note.lower() for note in yemen.notes)
    unavailable = {item.source_id for item in yemen.evidence if not item.available}
    assert {SourceId.ACLED, SourceId.WFP_FCS, SourceId.PRICE_INDEX, SourceId.CHIRPS} <= unavailable


def test_empty_corpus_fails_the_run(tmp_path: Path) -> None:
    (tmp_path / "corpus").mkdir()
    config = load_config(write_config(tmp_path, config_dict(tmp_path)))
    runner = PipelineRunner(config, clock=lambda: RUN_TS)
    report = runner.run(REFERENCE_MONDAY)
    runner.archive.dispose()

    assert report.fatal
    assert report.stages[Stage.INGEST] is StageStatus.FAILED
    assert report.stages[Stage.PUBLISH] is StageStatus.NOT_ATTEMPTED
    assert report.to_dict()["status"] == "failed"
    assert report.output_dir is None


def test_tampered_ledger_blocks_publication(runner: PipelineRunner, pipeline_config) -> None:
    ledger_path = pipeline_config.paths.hypothesis_ledger
    ledger_path.parent.mkdir(parents=True, exist_ok=True)
    ledger_path.write_bytes(b'{"version":2,"hash_algorithm":"sha256"}\n')

    report = runner.run(REFERENCE_MONDAY)
    assert report.stages[Stage.PUBLISH] is StageStatus.FAILED
    assert report.error.startswith("publish")
    assert not (report.output_dir / "hypotheses.json").exists()
    payload = json.loads((report.output_dir / "run_report.json").read_text(encoding="utf-8"))
    assert payload["status"] == "failed"
    assert not runner.archive.has_run_for(REFERENCE_MONDAY)
    assert runner.archive.region_history("SOM") == []
    assert runner.archive.latest() == (None, [])
    assert ledger_path.read_bytes() == b'{"version":2,"hash_algorithm":"sha256"}\n'

    # Once the ledger is repaired the week publishes without a rerun id.
    ledger_path.unlink()
    retry = runner.run(REFERENCE_MONDAY)
    assert retry.stages[Stage.PUBLISH] is StageStatus.OK
    assert runner.archive.get_run(retry.run_id).status == "completed"
    assert len(runner.ledger) == len(TEST_REGIONS)


def test_failed_ledger_append_rolls_back_the_archive(runner: PipelineRunner, monkeypatch) -> None:
    offered: list = []

    def refuse(hypotheses):
        offered.extend(hypotheses)
        raise OSError("No space left on device")

    monkeypatch.setattr(runner.ledger, "append_hypotheses", refuse)
    report = runner.run(REFERENCE_MONDAY)

    assert report.stages[Stage.PUBLISH] is StageStatus.FAILED
    assert "No space left" in report.error
    record = runner.archive.get_run(report.run_id)
    assert record.status == "failed"
    assert record.report["stages"]["publish"] == "failed"
    assert runner.archive.run_snapshots(report.run_id) == []
    assert runner.archive.stats()["snapshots"] == 0
    assert len(offered) == len(TEST_REGIONS)
    assert all(runner.archive.find_hypothesis(h.hypothesis_id) is None for h in offered)
    assert sorted(p.name for p in report.output_dir.iterdir()) == ["run_report.json"]


def test_full_region_run_is_reproducible_and_fast(
    tmp_path: Path, boundaries: Dict[str, RegionBoundary]
) -> None:
    assert len(boundaries) == 43
    outputs = []
    for name in ("first", "second"):
        root = tmp_path / name
        write_corpus(root / "corpus", boundaries, CorpusSpec(end=REFERENCE_MONDAY))
        data = config_dict(root, regions=sorted(boundaries), perturbation={"draws": 2000}, stability={"draws": 100})
        runner = PipelineRunner(load_config(write_config(root, data)), clock=lambda: RUN_TS)
        started = time.perf_counter()
        report = runner.run(REFERENCE_MONDAY)
        elapsed = time.perf_counter() - started
        runner.archive.dispose()

        assert report.stages[Stage.PUBLISH] is StageStatus.OK
        assert len(report.scored) + len(report.skipped) == 43
        assert elapsed < 10.0
        outputs.append((report.output_dir / "hypotheses.json").read_bytes())
    assert outputs[0] == outputs[1]
