"""
FastAPI dependencies for the read-only views over the archive and ledgers.
"""
from __future__ import annotations

from dataclasses import dataclass

from fastapi import Request

from ceres.config.loader import PipelineConfig
from ceres.store.archive import RunArchive
from ceres.store.ledger import GradeLedger, HypothesisLedger
from ceres.verification.metrics import CoverageRule


@dataclass(frozen=True)
class ServiceState:
    archive: RunArchive
    hypotheses: HypothesisLedger
    grades: GradeLedger
    coverage_rule: CoverageRule = CoverageRule.LITERAL

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "ServiceState":
        return cls(
            archive=RunArchive.from_path(config.paths.archive_path),
            hypotheses=HypothesisLedger(config.paths.hypothesis_ledger),
            grades=GradeLedger(config.paths.grading_ledger),
            coverage_rule=config.coverage_rule,
        )


def get_state(request: Request) -> ServiceState:
    """The per-application state installed by ``create_app``."""
    return request.app.state.ceres


__all__ = ["ServiceState", "get_state"]
