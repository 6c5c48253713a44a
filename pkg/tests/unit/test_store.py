from __future__ import annotations

from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

from ceres.core.errors import (
    AlreadyGradedError,
    DuplicateSnapshotError,
    LedgerTamperError,
    RunConflictError,
    UnknownRunError,
)
from ceres.core.types import AlertTier
from ceres.store.archive import RunArchive, RunSnapshot
from ceres.store.ledger import GENESIS_HASH, GradeLedger, HypothesisLedger, entry_digest, verify_bytes
from ceres.verification.grading import grade_hypothesis
from tests.helpers import REFERENCE_MONDAY, make_hypothesis

RUN_TS = datetime(2026, 3, 2, 6, 0, tzinfo=timezone.utc)


def _ledger_with_three(tmp_path: Path) -> HypothesisLedger:
    ledger = HypothesisLedger(tmp_path / "hypothesis_ledger.jsonl")
    ledger.append_hypotheses([make_hypothesis("SOM"), make_hypothesis("ETH"), make_hypothesis("SSD")])
    return ledger


def _rewrite(path: Path, mutate: Callable[[List[bytes]], List[bytes]]) -> None:
    lines = path.read_bytes().split(b"\n")[:-1]
    path.write_bytes(b"\n".join(mutate(lines)) + b"\n")


def test_ledger_chains_entries_from_genesis(tmp_path: Path) -> None:
    ledger = _ledger_with_three(tmp_path)
    entries = ledger.entries()
    assert [entry.sequence for entry in entries] == [1, 2, 3]
    assert entries[0].prev_hash == GENESIS_HASH
    for previous, entry in zip(entries, entries[1:]):
        assert entry.prev_hash == previous.entry_hash
    assert entries[1].entry_hash == entry_digest(entries[0].entry_hash, 2, "hypothesis", entries[1].payload)
    assert ledger.path.read_bytes().startswith(b'{"version":1,"hash_algorithm":"sha256"}\n')

    result = ledger.verify()
    assert result.valid and result.entries == 3 and result.first_bad_sequence is None
    assert [h.region_id for h in ledger.hypotheses()] == ["SOM", "ETH", "SSD"]
    assert ledger.find(make_hypothesis("ETH").hypothesis_id) == make_hypothesis("ETH")


def test_empty_ledger_is_valid(tmp_path: Path) -> None:
    ledger = HypothesisLedger(tmp_path / "missing.jsonl")
    assert ledger.verify().valid
    assert ledger.entries() == []


@pytest.mark.parametrize(
    ("mutate", "first_bad", "reason"),
    [
        (lambda lines: [lines[0], lines[1], lines[2].replace(b"Region ETH", b"Region EXX"), lines[3]], 2, "digest"),
        (lambda lines: [lines[0], lines[1], lines[3], lines[2]], 2, "sequence"),
        (lambda lines: [lines[0], lines[1], lines[3]], 2, "sequence"),
        (lambda lines: [b'{"version":2,"hash_algorithm":"sha256"}'] + lines[1:], 0, "header"),
        (lambda lines: [lines[0], lines[1].replace(b'{"sequence":1,', b'{"sequence": 1,')] + lines[2:], 1, "canonical"),
    ],
    ids=["edited-payload", "reordered", "deleted-entry", "header", "whitespace"],
)
def test_tampering_is_located(tmp_path: Path, mutate, first_bad: int, reason: str) -> None:
    ledger = _ledger_with_three(tmp_path)
    _rewrite(ledger.path, mutate)

    result = ledger.verify()
    assert not result.valid
    assert result.first_bad_sequence == first_bad
    assert reason in result.reason
    with pytest.raises(LedgerTamperError) as excinfo:
        ledger.entries()
    assert excinfo.value.first_bad_sequence == first_bad
    with pytest.raises(LedgerTamperError):
        ledger.append_hypotheses([make_hypothesis("YEM")])


def test_truncated_final_line_is_reported(tmp_path: Path) -> None:
    ledger = _ledger_with_three(tmp_path)
    data = ledger.path.read_bytes()
    ledger.path.write_bytes(data[:-10])

    result = verify_bytes(ledger.path.read_bytes())
    assert not result.valid
    assert result.first_bad_sequence == 3
    assert result.reason == "truncated final line"


def test_every_single_byte_mutation_is_located(tmp_path: Path) -> None:
    regions = ("SOM", "ETH", "SSD", "YEM", "AFG")
    ledger = HypothesisLedger(tmp_path / "hypothesis_ledger.jsonl")
    ledger.append_hypotheses(
        [
            make_hypothesis(regions[i % 5], reference_date=REFERENCE_MONDAY - timedelta(weeks=i // 5))
            for i in range(100)
        ]
    )
    data = ledger.path.read_bytes()
    assert verify_bytes(data).entries == 100

    rng = np.random.default_rng(8)
    for position in rng.integers(0, len(data), size=1000):
        position = int(position)
        mutated = bytearray(data)
        mutated[position] = (mutated[position] + int(rng.integers(1, 256))) % 256
        result = verify_bytes(bytes(mutated))
        assert not result.valid
        # Line 0 is the header; line k holds sequence k.
        assert result.first_bad_sequence == data.count(b"\n", 0, position)


def test_append_continues_the_chain(tmp_path: Path) -> None:
    ledger = _ledger_with_three(tmp_path)
    tip = ledger.entries()[-1]
    (entry,) = ledger.append_hypotheses([make_hypothesis("YEM")])
    assert entry.sequence == 4
    assert entry.prev_hash == tip.entry_hash
    assert HypothesisLedger(ledger.path).verify().entries == 4


def test_grades_are_write_once(tmp_path: Path) -> None:
    hypothesis = make_hypothesis()
    horizon = REFERENCE_MONDAY + timedelta(days=90)
    record = grade_hypothesis(hypothesis, [(horizon, 4)], as_of=horizon)
    grades = GradeLedger(tmp_path / "grading_ledger.json")

    stored = grades.record_grade(record)
    assert stored.prev_hash == GENESIS_HASH
    assert stored.entry_hash
    assert grades.graded_ids() == {hypothesis.hypothesis_id}
    assert grades.records() == [stored]

    before = grades.path.read_bytes()
    with pytest.raises(AlreadyGradedError):
        grades.record_grade(record)
    assert len(grades) == 1
    assert grades.path.read_bytes() == before


def _snapshots(run_id: str, run_ts: datetime, regions=("SOM", "ETH")) -> List[RunSnapshot]:
    return [RunSnapshot.from_hypothesis(run_id, run_ts, make_hypothesis(region)) for region in regions]


def _archive(tmp_path: Path) -> RunArchive:
    return RunArchive.from_path(tmp_path / "var" / "archive.sqlite")


def test_archive_round_trip(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    run = archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS, config_version="1")
    assert run.status == "running"
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS))
    archive.finish_run("run-20260302", "completed", {"scored": 2})

    record, hypotheses = archive.latest()
    assert record.run_id == "run-20260302"
    assert record.run_ts == RUN_TS
    assert record.report == {"scored": 2}
    assert {h.region_id for h in hypotheses} == {"SOM", "ETH"}
    assert archive.find_hypothesis(make_hypothesis("ETH").hypothesis_id) == make_hypothesis("ETH")
    assert archive.has_run_for(REFERENCE_MONDAY)
    archive.dispose()


def test_latest_ignores_unfinished_runs(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS))
    assert archive.latest() == (None, [])
    assert archive.latest_run() is None

    archive.finish_run("run-20260302", "completed")
    later = RUN_TS + timedelta(days=7)
    archive.begin_run("run-20260309", REFERENCE_MONDAY + timedelta(days=7), later)
    archive.append_snapshots(_snapshots("run-20260309", later, regions=("SOM",)))
    record, hypotheses = archive.latest()
    assert record.run_id == "run-20260302"
    assert len(hypotheses) == 2
    archive.dispose()


def test_run_conflicts(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    with pytest.raises(RunConflictError):
        archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS, allow_same_date=True)
    with pytest.raises(RunConflictError):
        archive.begin_run("rerun-1", REFERENCE_MONDAY, RUN_TS)
    archive.begin_run("rerun-1", REFERENCE_MONDAY, RUN_TS, allow_same_date=True)
    assert len(archive.runs()) == 2
    archive.dispose()


def test_snapshot_writes_are_validated(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    with pytest.raises(UnknownRunError):
        archive.append_snapshots(_snapshots("run-unknown", RUN_TS))
    with pytest.raises(UnknownRunError):
        archive.finish_run("run-unknown", "completed")
    with pytest.raises(UnknownRunError):
        archive.get_run("run-unknown")

    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS))
    with pytest.raises(DuplicateSnapshotError):
        archive.append_snapshots(_snapshots("run-20260302", RUN_TS, regions=("YEM", "SOM")))
    # The rejected batch leaves nothing behind.
    assert {s.region_id for s in archive.run_snapshots("run-20260302")} == {"SOM", "ETH"}
    archive.dispose()


def test_region_history_is_newest_first(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    for week in range(3):
        run_ts = RUN_TS + timedelta(weeks=week)
        run_id = f"run-{week}"
        archive.begin_run(run_id, REFERENCE_MONDAY + timedelta(weeks=week), run_ts)
        archive.append_snapshots(_snapshots(run_id, run_ts))
        archive.finish_run(run_id, "completed")

    history = archive.region_history("SOM", limit=2)
    assert [s.run_id for s in history] == ["run-2", "run-1"]
    assert history[0].to_dict()["p_ipc3plus_90d"] == pytest.approx(0.8)
    assert history[0].top_drivers == ("IPC_TREND", "CONFLICT")
    assert archive.region_history("KEN") == []
    with pytest.raises(ValueError):
        archive.region_history("SOM", limit=0)
    archive.dispose()


def test_stats_summarise_the_archive(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    assert archive.stats()["runs"] == 0
    assert archive.stats()["latest_run_id"] is None

    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    snapshots = [
        RunSnapshot.from_hypothesis("run-20260302", RUN_TS, make_hypothesis("SOM")),
        RunSnapshot.from_hypothesis(
            "run-20260302", RUN_TS, make_hypothesis("YEM", tier=AlertTier.TIER_3, low_coverage=True)
        ),
    ]
    archive.append_snapshots(snapshots)
    archive.finish_run("run-20260302", "completed")

    stats = archive.stats()
    assert stats["runs"] == 1
    assert stats["snapshots"] == 2
    assert stats["regions"] == 2
    assert stats["first_run_ts"] == "2026-03-02T06:00:00Z"
    assert stats["latest_tier_counts"] == {"TIER-1": 1, "TIER-3": 1}
    assert stats["latest_low_coverage"] == 1
    archive.dispose()


def test_abandoned_run_is_hidden_and_frees_its_date(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS))

    assert archive.abandon_run("run-20260302", {"error": "publish: disk full"}) == 2
    record = archive.get_run("run-20260302")
    assert record.status == "failed"
    assert record.report == {"error": "publish: disk full"}
    assert archive.run_snapshots("run-20260302") == []
    assert archive.region_history("SOM") == []
    assert archive.find_hypothesis(make_hypothesis("SOM").hypothesis_id) is None
    assert not archive.has_run_for(REFERENCE_MONDAY)
    with pytest.raises(UnknownRunError):
        archive.abandon_run("run-unknown")

    # The same id and date can be published again without a rerun id.
    assert archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS).status == "running"
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS, regions=("SOM",)))
    archive.finish_run("run-20260302", "completed")
    assert [s.run_id for s in archive.region_history("SOM")] == ["run-20260302"]
    assert len(archive.runs()) == 1
    archive.dispose()


def test_reads_skip_snapshots_of_unfinished_runs(tmp_path: Path) -> None:
    archive = _archive(tmp_path)
    archive.begin_run("run-20260302", REFERENCE_MONDAY, RUN_TS)
    archive.append_snapshots(_snapshots("run-20260302", RUN_TS))
    assert archive.region_history("SOM") == []
    assert archive.find_hypothesis(make_hypothesis("ETH").hypothesis_id) is None

    archive.finish_run("run-20260302", "completed")
    assert len(archive.region_history("SOM")) == 1
    assert archive.find_hypothesis(make_hypothesis("ETH").hypothesis_id) == make_hypothesis("ETH")
    archive.dispose()
