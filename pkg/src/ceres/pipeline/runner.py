"""Seven-stage weekly pipeline: Ingest, Normalise, Signals, Convergence, Score, Hypotheses, Publish.

Stage 1-2 failures abort the run before anything is scored. Failures in
Stages 3-6 drop only the affected region. A Stage 7 failure is recorded in
the report and rolls the run back out of the archive.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from sqlalchemy.exc import SQLAlchemyError

from ceres.config.loader import PipelineConfig
from ceres.convergence.detect import ConvergenceTier, classify_convergence, flag_pillars
from ceres.core.errors import (
    CeresError,
    IngestError,
    LedgerTamperError,
    RegionSkipped,
    RunConflictError,
    UnknownRunError,
)
from ceres.core.serialization import dumps_hypothesis, format_timestamp
from ceres.core.types import (
    AlertTier,
    FamineHypothesis,
    FeatureVector,
    ProbabilityVector,
    SignalSet,
    SourceId,
    rank_hypotheses,
)
from ceres.hypothesis.builder import build_hypothesis, evidence_items, finalize_probabilities
from ceres.hypothesis.drivers import decompose_drivers
from ceres.ingestion.adapters import build_fixture_registry
from ceres.ingestion.align import weekly_observations
from ceres.ingestion.frames import CanonicalFrame, FetchMode, monday_on_or_before
from ceres.ingestion.http import HttpSkeletonAdapter
from ceres.ingestion.registry import SOURCE_ATTRIBUTIONS, AdapterRegistry, default_descriptor
from ceres.ingestion.spatial import RegionBoundary, load_regions
from ceres.logging.summaries import persist_summary
from ceres.scoring.model import CoefficientTable, PhaseProbabilities, load_coefficients, score_region
from ceres.scoring.stability import coefficient_stability
from ceres.signals.baselines import BaselineTable, load_baselines
from ceres.signals.composite import CompositeResult, composite_stress
from ceres.signals.extract import extract_signals
from ceres.store.archive import COMPLETED, FAILED, RunArchive, RunSnapshot
from ceres.store.ledger import HypothesisLedger
from ceres.uncertainty.intervals import derive_seed, sensitivity_interval

LOGGER = logging.getLogger(__name__)


class Stage(str, Enum):
    INGEST = "ingest"
    NORMALISE = "normalise"
    SIGNALS = "signals"
    CONVERGENCE = "convergence"
    SCORE = "score"
    HYPOTHESES = "hypotheses"
    PUBLISH = "publish"


class StageStatus(str, Enum):
    OK = "ok"
    PARTIAL = "partial"
    FAILED = "failed"
    NOT_ATTEMPTED = "not-attempted"


@dataclass
class RegionOutcome:
    region: str
    status: str = "pending"
    reason: Optional[str] = None
    failed_stage: Optional[Stage] = None
    tier: Optional[str] = None
    hypothesis_id: Optional[str] = None
    low_coverage: bool = False

    def to_dict(self) -> Dict[str, object]:
        return {
            "status": self.status,
            "reason": self.reason,
            "failed_stage": self.failed_stage.value if self.failed_stage else None,
            "tier": self.tier,
            "hypothesis_id": self.hypothesis_id,
            "low_coverage": self.low_coverage,
        }


@dataclass
class PipelineRunReport:
    run_id: str
    run_date: date
    run_ts: datetime
    stages: Dict[Stage, StageStatus] = field(
        default_factory=lambda: {stage: StageStatus.NOT_ATTEMPTED for stage in Stage}
    )
    regions: Dict[str, RegionOutcome] = field(default_factory=dict)
    duration_s: float = 0.0
    error: Optional[str] = None
    output_dir: Optional[Path] = None

    @property
    def fatal(self) -> bool:
        return any(self.stages[stage] is StageStatus.FAILED for stage in (Stage.INGEST, Stage.NORMALISE))

    @property
    def scored(self) -> List[str]:
        return sorted(r.region for r in self.regions.values() if r.status == "scored")

    @property
    def skipped(self) -> List[str]:
        return sorted(r.region for r in self.regions.values() if r.status == "skipped")

    def to_dict(self) -> Dict[str, object]:
        return {
            "run_id": self.run_id,
            "run_date": self.run_date.isoformat(),
            "run_ts": format_timestamp(self.run_ts),
            "status": FAILED if self.fatal or self.stages[Stage.PUBLISH] is StageStatus.FAILED else COMPLETED,
            "stages": {stage.value: status.value for stage, status in self.stages.items()},
            "scored": len(self.scored),
            "skipped": len(self.skipped),
            "regions": {iso3: self.regions[iso3].to_dict() for iso3 in sorted(self.regions)},
            "duration_s": round(self.duration_s, 3),
            "error": self.error,
        }


@dataclass(frozen=True)
class PipelineResources:
    boundaries: Mapping[str, RegionBoundary]
    baselines: BaselineTable
    coefficients: CoefficientTable
    registry: AdapterRegistry


@dataclass
class _RegionState:
    """Intermediate products for one region as it moves through Stages 3-6."""

    boundary: RegionBoundary
    frames: List[CanonicalFrame]
    observations: Dict[str, Optional[float]] = field(default_factory=dict)
    signals: Optional[SignalSet] = None
    composite: Optional[CompositeResult] = None
    convergence: Optional[ConvergenceTier] = None
    features: Optional[FeatureVector] = None
    probabilities: Optional[ProbabilityVector] = None
    tier: Optional[AlertTier] = None
    stable: bool = True
    hypothesis: Optional[FamineHypothesis] = None


def build_registry(config: PipelineConfig) -> AdapterRegistry:
    if config.ingestion.fetch_mode is FetchMode.FIXTURE:
        return build_fixture_registry(config.paths.fixture_root)
    registry = AdapterRegistry()
    for source in SourceId:
        registry.register(
            HttpSkeletonAdapter(
                default_descriptor(source, FetchMode.HTTP_SKELETON),
                config.ingestion.http_base_url or "",
                config.paths.fixture_root,
                max_retries=config.ingestion.max_retries,
                timeout_s=config.ingestion.timeout_s,
            )
        )
    return registry


def load_resources(config: PipelineConfig, registry: Optional[AdapterRegistry] = None) -> PipelineResources:
    boundaries = load_regions(config.paths.regions_path)
    missing = [iso3 for iso3 in config.regions if iso3 not in boundaries]
    if missing:
        raise IngestError(f"No boundary for configured regions: {', '.join(missing)}")
    return PipelineResources(
        boundaries={iso3: boundaries[iso3] for iso3 in config.regions},
        baselines=load_baselines(config.paths.baselines_path),
        coefficients=load_coefficients(config.paths.coefficients_path),
        registry=registry or build_registry(config),
    )


def run_id_for(run_date: date, rerun_id: Optional[str] = None) -> str:
    return rerun_id or f"run-{run_date:%Y%m%d}"


class PipelineRunner:
    """Executes one weekly run against a config, an archive and a hypothesis ledger."""

    def __init__(
        self,
        config: PipelineConfig,
        *,
        resources: Optional[PipelineResources] = None,
        archive: Optional[RunArchive] = None,
        ledger: Optional[HypothesisLedger] = None,
        clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
    ) -> None:
        self._config = config
        self._resources = resources
        self._archive = archive or RunArchive.from_path(config.paths.archive_path)
        self._ledger = ledger or HypothesisLedger(config.paths.hypothesis_ledger)
        self._clock = clock

    @property
    def archive(self) -> RunArchive:
        return self._archive

    @property
    def ledger(self) -> HypothesisLedger:
        return self._ledger

    def run(self, requested: date, *, rerun_id: Optional[str] = None) -> PipelineRunReport:
        run_date = monday_on_or_before(requested)
        if run_date != requested:
            LOGGER.warning(
                "Run date %s is not a Monday; snapping back to %s",
                requested.isoformat(),
                run_date.isoformat(),
                extra={"stage": "run"},
            )
        if rerun_id is None and self._archive.has_run_for(run_date):
            raise RunConflictError(
                f"a run for {run_date.isoformat()} is already archived; pass --rerun-id to issue a new run"
            )
        if rerun_id is not None and self._run_exists(rerun_id):
            raise RunConflictError(f"run {rerun_id} already exists")

        started = time.perf_counter()
        report = PipelineRunReport(run_id=run_id_for(run_date, rerun_id), run_date=run_date, run_ts=self._clock())
        try:
            states = self._stage_ingest(report, run_date)
            if states is not None:
                states = self._stage_normalise(report, run_date, states)
            if states is not None:
                hypotheses = self._stages_per_region(report, run_date, states)
                self._stage_publish(report, run_date, hypotheses, rerun=rerun_id is not None)
        finally:
            report.duration_s = time.perf_counter() - started
        LOGGER.info(
            "Run %s finished: %d scored, %d skipped in %.2fs",
            report.run_id,
            len(report.scored),
            len(report.skipped),
            report.duration_s,
            extra={"stage": "run"},
        )
        return report

    def _run_exists(self, run_id: str) -> bool:
        try:
            record = self._archive.get_run(run_id)
        except UnknownRunError:
            return False
        return record.status != FAILED

    # -- Stage 1 --------------------------------------------------------------

    def _stage_ingest(self, report: PipelineRunReport, week: date) -> Optional[Dict[str, _RegionState]]:
        try:
            resources = self._resources or load_resources(self._config)
            self._resources = resources
            tasks = [(iso3, source) for iso3 in self._config.regions for source in resources.registry.sources()]
            lookback = self._config.ingestion.lookback_weeks

            def fetch(task: Tuple[str, SourceId]) -> List[CanonicalFrame]:
                iso3, source = task
                return resources.registry.ingest(source, resources.boundaries[iso3], week, lookback)

            with ThreadPoolExecutor(max_workers=self._config.ingestion.max_workers) as pool:
                results = list(pool.map(fetch, tasks))
        except (IngestError, OSError, ValueError) as exc:
            return self._fatal(report, Stage.INGEST, exc)

        states = {
            iso3: _RegionState(boundary=resources.boundaries[iso3], frames=[])
            for iso3 in self._config.regions
        }
        for (iso3, _source), frames in zip(tasks, results):
            states[iso3].frames.extend(frames)
        if not any(state.frames for state in states.values()):
            return self._fatal(report, Stage.INGEST, IngestError("no source returned data for any region"))
        for iso3 in self._config.regions:
            report.regions[iso3] = RegionOutcome(region=iso3)
        report.stages[Stage.INGEST] = StageStatus.OK
        return states

    # -- Stage 2 --------------------------------------------------------------

    def _stage_normalise(
        self, report: PipelineRunReport, week: date, states: Dict[str, _RegionState]
    ) -> Optional[Dict[str, _RegionState]]:
        try:
            for state in states.values():
                state.observations = weekly_observations(state.frames, week, self._config.ingestion.lookback_weeks)
        except (CeresError, ValueError) as exc:
            return self._fatal(report, Stage.NORMALISE, exc)
        report.stages[Stage.NORMALISE] = StageStatus.OK
        return states

    def _fatal(self, report: PipelineRunReport, stage: Stage, exc: Exception) -> None:
        report.stages[stage] = StageStatus.FAILED
        report.error = f"{stage.value}: {exc}"
        LOGGER.error("Fatal %s failure: %s", stage.value, exc, extra={"stage": stage.value})
        return None

    # -- Stages 3-6 -----------------------------------------------------------

    def _stages_per_region(
        self, report: PipelineRunReport, week: date, states: Dict[str, _RegionState]
    ) -> List[FamineHypothesis]:
        steps: List[Tuple[Stage, Callable[[str, _RegionState, date], None]]] = [
            (Stage.SIGNALS, self._signals),
            (Stage.CONVERGENCE, self._convergence),
            (Stage.SCORE, self._score),
            (Stage.HYPOTHESES, self._hypothesis),
        ]
        failures: Dict[Stage, int] = {stage: 0 for stage, _ in steps}

        def process(iso3: str) -> None:
            state = states[iso3]
            outcome = report.regions[iso3]
            for stage, step in steps:
                try:
                    step(iso3, state, week)
                except (CeresError, ValueError, ArithmeticError) as exc:
                    outcome.status = "skipped"
                    outcome.reason = str(exc)
                    outcome.failed_stage = stage
                    level = logging.INFO if isinstance(exc, RegionSkipped) else logging.WARNING
                    LOGGER.log(level, "Region skipped: %s", exc, extra={"stage": stage.value, "region": iso3})
                    return
            outcome.status = "scored"
            outcome.tier = state.hypothesis.alert_tier.value
            outcome.hypothesis_id = state.hypothesis.hypothesis_id
            outcome.low_coverage = state.hypothesis.low_coverage

        with ThreadPoolExecutor(max_workers=self._config.ingestion.max_workers) as pool:
            list(pool.map(process, self._config.regions))

        for outcome in report.regions.values():
            if outcome.failed_stage is not None:
                failures[outcome.failed_stage] += 1
        for stage, _ in steps:
            report.stages[stage] = StageStatus.PARTIAL if failures[stage] else StageStatus.OK
        return [states[iso3].hypothesis for iso3 in self._config.regions if states[iso3].hypothesis is not None]

    def _signals(self, iso3: str, state: _RegionState, week: date) -> None:
        state.signals = extract_signals(iso3, week, state.observations, self._resources.baselines)
        state.composite = composite_stress(state.signals, self._config.css_weights)
        if state.composite.low_coverage:
            LOGGER.warning(
                "Low coverage: %d of 6 signals available; widening perturbation",
                state.composite.n_available,
                extra={"stage": Stage.SIGNALS.value, "region": iso3},
            )

    def _convergence(self, iso3: str, state: _RegionState, week: date) -> None:
        state.convergence = classify_convergence(flag_pillars(state.signals.pillar_z))

    def _score(self, iso3: str, state: _RegionState, week: date) -> None:
        signals, composite, convergence = state.signals, state.composite, state.convergence
        state.features = FeatureVector(
            composite_stress=composite.css,
            ipc_stress=signals.ipc or 0.0,
            conflict_stress=signals.conflict or 0.0,
            drought_stress=signals.drought or 0.0,
            food_access_stress=signals.food_access or 0.0,
            price_stress=signals.price or 0.0,
            convergence_score=convergence.score,
            n_independent_flagged=convergence.raw_count,
            low_coverage=composite.low_coverage,
        )
        table = self._resources.coefficients
        bounds = self._config.monotonicity
        capped = score_region(state.features, table, bounds)
        interval = sensitivity_interval(
            state.features, table, self._config.perturbation, region=iso3, reference_date=week
        )
        state.probabilities = published = finalize_probabilities(
            ProbabilityVector(
                p3=capped.p3, p4=capped.p4, p5=capped.p5, interval_low=interval.low, interval_high=interval.high
            ),
            bounds,
        )
        rules = self._config.tiers
        stability = coefficient_stability(
            state.features,
            lambda p: rules.classify(p.p3, p.p4, convergence.tier, composite.css),
            table=table,
            bounds=bounds,
            config=self._config.stability,
            seed=derive_seed(self._config.seed, iso3, week),
            baseline=PhaseProbabilities(published.p3, published.p4, published.p5),
        )
        state.tier = stability.baseline_tier
        state.stable = stability.stable
        if not stability.stable:
            LOGGER.info(
                "Tier unstable under coefficient perturbation: %s",
                ", ".join(sorted(tier.value for tier in stability.tiers_seen)),
                extra={"stage": Stage.SCORE.value, "region": iso3},
            )

    def _hypothesis(self, iso3: str, state: _RegionState, week: date) -> None:
        probabilities = state.probabilities
        latest: Dict[SourceId, Optional[date]] = {}
        attributions: Dict[SourceId, str] = dict(SOURCE_ATTRIBUTIONS)
        for frame in state.frames:
            current = latest.get(frame.source)
            if current is None or frame.week > current:
                latest[frame.source] = frame.week
                attributions[frame.source] = frame.metadata.attribution
        state.hypothesis = build_hypothesis(
            region=iso3,
            region_name=state.boundary.name,
            reference_date=week,
            features=state.features,
            probabilities=probabilities,
            tier=state.tier,
            convergence=state.convergence.tier,
            drivers=decompose_drivers(state.signals, self._config.drivers),
            evidence=evidence_items(week, latest, attributions),
            stable=state.stable,
            coverage_factor=state.composite.coverage_factor,
            current_phase=state.signals.ipc_phase,
            bounds=self._config.monotonicity,
        )

    # -- Stage 7 --------------------------------------------------------------

    def _stage_publish(
        self,
        report: PipelineRunReport,
        week: date,
        hypotheses: List[FamineHypothesis],
        *,
        rerun: bool,
    ) -> None:
        """Archive, write, then ledger; the ledger append is the commit point.

        Any failure before the append abandons the archived run and removes the
        hypothesis files, so readers never see hypotheses the ledger lacks.
        """
        ranked = rank_hypotheses(hypotheses)
        folder = week.isoformat() if not rerun else f"{week.isoformat()}-{report.run_id}"
        out_dir = self._config.paths.output_root / folder
        written: List[Path] = []
        begun = ledgered = False
        try:
            tip = self._ledger.verify()
            if not tip.valid:
                raise LedgerTamperError(
                    f"{self._ledger.path} failed verification ({tip.reason}); nothing published",
                    tip.first_bad_sequence,
                )
            self._archive.begin_run(
                report.run_id,
                week,
                report.run_ts,
                config_version=self._config.config_version,
                allow_same_date=rerun,
            )
            begun = True
            self._archive.append_snapshots(
                [RunSnapshot.from_hypothesis(report.run_id, report.run_ts, h) for h in ranked]
            )
            out_dir.mkdir(parents=True, exist_ok=True)
            body = ",\n".join(dumps_hypothesis(h) for h in ranked)
            written.append(out_dir / "hypotheses.json")
            written[-1].write_text(f"[\n{body}\n]\n" if ranked else "[]\n", encoding="utf-8")
            for hypothesis in ranked:
                written.append(out_dir / f"{hypothesis.region_id}.json")
                written[-1].write_text(dumps_hypothesis(hypothesis) + "\n", encoding="utf-8")
            self._ledger.append_hypotheses(ranked)
            ledgered = True
            report.stages[Stage.PUBLISH] = StageStatus.OK
            self._archive.finish_run(report.run_id, COMPLETED, report.to_dict())
        except (CeresError, OSError, SQLAlchemyError) as exc:
            report.stages[Stage.PUBLISH] = StageStatus.FAILED
            report.error = f"publish: {exc}"
            LOGGER.error("Publish failed: %s", exc, extra={"stage": Stage.PUBLISH.value})
            self._roll_back_publish(report, written if not ledgered else [], begun)
        finally:
            try:
                out_dir.mkdir(parents=True, exist_ok=True)
                persist_summary(report.to_dict(), out_dir / "run_report.json")
                report.output_dir = out_dir
            except OSError as exc:
                LOGGER.error("Could not write run report: %s", exc, extra={"stage": Stage.PUBLISH.value})

    def _roll_back_publish(self, report: PipelineRunReport, written: List[Path], begun: bool) -> None:
        for path in written:
            path.unlink(missing_ok=True)
        if not begun:
            return
        try:
            self._archive.abandon_run(report.run_id, report.to_dict())
        except (CeresError, SQLAlchemyError) as exc:
            LOGGER.error(
                "Could not abandon run %s: %s", report.run_id, exc, extra={"stage": Stage.PUBLISH.value}
            )


def build_default_runner(config: PipelineConfig) -> PipelineRunner:
    """Runner wired to the archive and hypothesis ledger named in the config."""
    return PipelineRunner(
        config,
        archive=RunArchive.from_path(config.paths.archive_path),
        ledger=HypothesisLedger(config.paths.hypothesis_ledger),
    )


__all__ = [
    "PipelineResources",
    "PipelineRunReport",
    "PipelineRunner",
    "RegionOutcome",
    "Stage",
    "StageStatus",
    "build_default_runner",
    "build_registry",
    "load_resources",
    "run_id_for",
]
