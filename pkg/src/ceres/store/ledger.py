"""Write-once, hash-chained JSON-lines ledgers.

File layout: a header line ``{"version":1,"hash_algorithm":"sha256"}`` followed
by one canonical JSON entry per line::

    {"sequence":1,"kind":"hypothesis","payload":{...},"prev_hash":"00..","entry_hash":".."}

``entry_hash = sha256(prev_hash + canonical({"sequence","kind","payload"}))``.
Every line must equal the canonical re-serialization of its parsed content, so
a single changed byte anywhere is caught at the entry that holds it.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Set

from ceres.core.errors import AlreadyGradedError, LedgerTamperError
from ceres.core.serialization import canonical_dumps, hypothesis_from_dict, hypothesis_to_dict, sha256_hex
from ceres.core.types import FamineHypothesis
from ceres.verification.grading import GradeRecord

LOGGER = logging.getLogger(__name__)

GENESIS_HASH = "0" * 64
LEDGER_HEADER: Dict[str, Any] = {"version": 1, "hash_algorithm": "sha256"}
HYPOTHESIS_KIND = "hypothesis"
GRADE_KIND = "grade"


@dataclass(frozen=True)
class LedgerEntry:
    sequence: int
    kind: str
    payload: Mapping[str, Any]
    prev_hash: str
    entry_hash: str

    def to_line(self) -> str:
        return canonical_dumps(
            {
                "sequence": self.sequence,
                "kind": self.kind,
                "payload": self.payload,
                "prev_hash": self.prev_hash,
                "entry_hash": self.entry_hash,
            }
        )


@dataclass(frozen=True)
class LedgerVerification:
    valid: bool
    first_bad_sequence: Optional[int]
    entries: int
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "first_bad_sequence": self.first_bad_sequence,
            "entries": self.entries,
            "reason": self.reason,
        }


def entry_digest(prev_hash: str, sequence: int, kind: str, payload: Mapping[str, Any]) -> str:
    body = canonical_dumps({"sequence": sequence, "kind": kind, "payload": payload})
    return sha256_hex(prev_hash + body)


def verify_bytes(data: bytes) -> LedgerVerification:
    """Verify a whole ledger image. Sequence 0 denotes the header line."""
    if not data:
        return LedgerVerification(True, None, 0)
    if not data.endswith(b"\n"):
        lines = data.split(b"\n")
        return LedgerVerification(False, max(len(lines) - 1, 0), max(len(lines) - 2, 0), "truncated final line")
    lines = data[:-1].split(b"\n")
    header_line = _decode(lines[0])
    if header_line != canonical_dumps(LEDGER_HEADER):
        return LedgerVerification(False, 0, 0, "header mismatch")

    prev_hash = GENESIS_HASH
    for offset, raw in enumerate(lines[1:], start=1):
        bad = LedgerVerification(False, offset, offset - 1, "")
        text = _decode(raw)
        if text is None:
            return _with_reason(bad, "not UTF-8")
        try:
            entry = json.loads(text)
        except json.JSONDecodeError:
            return _with_reason(bad, "not JSON")
        if not isinstance(entry, dict) or list(entry) != ["sequence", "kind", "payload", "prev_hash", "entry_hash"]:
            return _with_reason(bad, "unexpected entry keys")
        try:
            canonical = canonical_dumps(entry)
        except (TypeError, ValueError):
            return _with_reason(bad, "not canonical")
        if canonical != text:
            return _with_reason(bad, "not canonical")
        if entry["sequence"] != offset or isinstance(entry["sequence"], bool):
            return _with_reason(bad, "sequence gap")
        if entry["prev_hash"] != prev_hash:
            return _with_reason(bad, "broken chain")
        if not isinstance(entry["kind"], str) or not isinstance(entry["payload"], dict):
            return _with_reason(bad, "malformed entry")
        expected = entry_digest(prev_hash, offset, entry["kind"], entry["payload"])
        if entry["entry_hash"] != expected:
            return _with_reason(bad, "digest mismatch")
        prev_hash = expected
    return LedgerVerification(True, None, len(lines) - 1)


def _decode(raw: bytes) -> Optional[str]:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return None


def _with_reason(result: LedgerVerification, reason: str) -> LedgerVerification:
    return LedgerVerification(result.valid, result.first_bad_sequence, result.entries, reason)


class Ledger:
    """Single-writer append-only ledger file. Reads never take the writer lock."""

    def __init__(self, path: str | Path) -> None:
        self._path = Path(path)
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        return self._path

    def _read(self) -> bytes:
        if not self._path.exists():
            return b""
        return self._path.read_bytes()

    def verify(self) -> LedgerVerification:
        result = verify_bytes(self._read())
        if not result.valid:
            LOGGER.error(
                "Ledger %s failed verification at sequence %s (%s)",
                self._path,
                result.first_bad_sequence,
                result.reason,
            )
        return result

    def entries(self) -> List[LedgerEntry]:
        """Parsed entries of a verified ledger; raises LedgerTamperError otherwise."""
        data = self._read()
        result = verify_bytes(data)
        if not result.valid:
            raise LedgerTamperError(
                f"{self._path} failed verification ({result.reason})", result.first_bad_sequence
            )
        return [_parse_entry(line) for line in data.decode("utf-8").split("\n")[1:-1]]

    def __iter__(self) -> Iterator[LedgerEntry]:
        return iter(self.entries())

    def __len__(self) -> int:
        return len(self.entries())

    def append(self, kind: str, payload: Mapping[str, Any]) -> LedgerEntry:
        """Verify the tip, chain the entry, and fsync before returning it."""
        with self._lock:
            return self._append_locked(kind, [payload])[0]

    def append_many(self, kind: str, payloads: List[Mapping[str, Any]]) -> List[LedgerEntry]:
        """Chain a batch behind one tip verification and one durable write."""
        with self._lock:
            return self._append_locked(kind, payloads)

    def _append_locked(self, kind: str, payloads: List[Mapping[str, Any]]) -> List[LedgerEntry]:
        data = self._read()
        result = verify_bytes(data)
        if not result.valid:
            raise LedgerTamperError(
                f"refusing to append to {self._path}: {result.reason}", result.first_bad_sequence
            )
        if not payloads:
            return []
        if result.entries:
            tip = _parse_entry(data.decode("utf-8").split("\n")[-2])
            prev_hash, sequence = tip.entry_hash, tip.sequence + 1
        else:
            prev_hash, sequence = GENESIS_HASH, 1
        entries: List[LedgerEntry] = []
        for payload in payloads:
            # Stored payloads are exactly what verification re-parses.
            normalized = json.loads(canonical_dumps(dict(payload)))
            entry = LedgerEntry(
                sequence=sequence,
                kind=kind,
                payload=normalized,
                prev_hash=prev_hash,
                entry_hash=entry_digest(prev_hash, sequence, kind, normalized),
            )
            entries.append(entry)
            prev_hash, sequence = entry.entry_hash, sequence + 1
        chunk = "".join(entry.to_line() + "\n" for entry in entries)
        if not data:
            chunk = canonical_dumps(LEDGER_HEADER) + "\n" + chunk
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with self._path.open("ab") as handle:
            handle.write(chunk.encode("utf-8"))
            handle.flush()
            os.fsync(handle.fileno())
        return entries


def _parse_entry(line: str) -> LedgerEntry:
    raw = json.loads(line)
    return LedgerEntry(
        sequence=raw["sequence"],
        kind=raw["kind"],
        payload=raw["payload"],
        prev_hash=raw["prev_hash"],
        entry_hash=raw["entry_hash"],
    )


class HypothesisLedger(Ledger):
    """Every issued hypothesis, in publication order."""

    def append_hypotheses(self, hypotheses: List[FamineHypothesis]) -> List[LedgerEntry]:
        return self.append_many(HYPOTHESIS_KIND, [hypothesis_to_dict(h) for h in hypotheses])

    def hypotheses(self) -> List[FamineHypothesis]:
        return [hypothesis_from_dict(entry.payload) for entry in self.entries() if entry.kind == HYPOTHESIS_KIND]

    def find(self, hypothesis_id: str) -> Optional[FamineHypothesis]:
        for hypothesis in self.hypotheses():
            if hypothesis.hypothesis_id == hypothesis_id:
                return hypothesis
        return None


class GradeLedger(Ledger):
    """Write-once grades: one entry per hypothesis id, graded or ungradable."""

    def graded_ids(self) -> Set[str]:
        return {entry.payload["hypothesis_id"] for entry in self.entries() if entry.kind == GRADE_KIND}

    def records(self) -> List[GradeRecord]:
        return [
            GradeRecord.from_payload(entry.payload, prev_hash=entry.prev_hash, entry_hash=entry.entry_hash)
            for entry in self.entries()
            if entry.kind == GRADE_KIND
        ]

    def record_grade(self, record: GradeRecord) -> GradeRecord:
        with self._lock:
            if record.hypothesis_id in self.graded_ids():
                raise AlreadyGradedError(f"{record.hypothesis_id} is already graded")
            (entry,) = self._append_locked(GRADE_KIND, [record.to_payload()])
        return GradeRecord.from_payload(entry.payload, prev_hash=entry.prev_hash, entry_hash=entry.entry_hash)


__all__ = [
    "GENESIS_HASH",
    "GRADE_KIND",
    "GradeLedger",
    "HYPOTHESIS_KIND",
    "HypothesisLedger",
    "LEDGER_HEADER",
    "Ledger",
    "LedgerEntry",
    "LedgerVerification",
    "entry_digest",
    "verify_bytes",
]
