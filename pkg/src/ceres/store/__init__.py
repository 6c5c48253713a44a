"""Stage 7 persistence: the run archive and the write-once ledgers."""

from ceres.store.archive import DEFAULT_HISTORY_LIMIT, RunArchive, RunRecord, RunSnapshot
from ceres.store.ledger import (
    GENESIS_HASH,
    GradeLedger,
    HypothesisLedger,
    Ledger,
    LedgerEntry,
    LedgerVerification,
    verify_bytes,
)

__all__ = [
    "DEFAULT_HISTORY_LIMIT",
    "GENESIS_HASH",
    "GradeLedger",
    "HypothesisLedger",
    "Ledger",
    "LedgerEntry",
    "LedgerVerification",
    "RunArchive",
    "RunRecord",
    "RunSnapshot",
    "verify_bytes",
]
