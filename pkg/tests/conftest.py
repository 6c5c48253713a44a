from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Iterator

import pytest

from ceres.config.loader import PipelineConfig, load_config
from ceres.ingestion.corpus import CorpusSpec, write_corpus
from ceres.ingestion.spatial import RegionBoundary, load_regions
from ceres.pipeline.runner import PipelineRunner, PipelineRunReport
from tests.helpers import (
    CONFIG_DIR,
    REFERENCE_MONDAY,
    RUN_TS,
    TEST_REGIONS,
    TEST_SEVERITY,
    config_dict,
    write_config,
)


@pytest.fixture(autouse=True)
def _restore_root_logging():
    # CLI entrypoints replace the root handlers; put pytest's back afterwards.
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture(scope="session")
def boundaries() -> Dict[str, RegionBoundary]:
    return load_regions(CONFIG_DIR / "regions.json")


@pytest.fixture
def corpus_root(tmp_path: Path, boundaries: Dict[str, RegionBoundary]) -> Path:
    spec = CorpusSpec(end=REFERENCE_MONDAY, severity=dict(TEST_SEVERITY))
    summary = write_corpus(tmp_path / "corpus", boundaries, spec, only=TEST_REGIONS)
    return summary.root


@pytest.fixture
def config_path(tmp_path: Path, corpus_root: Path) -> Path:
    return write_config(tmp_path, config_dict(tmp_path))


@pytest.fixture
def pipeline_config(config_path: Path) -> PipelineConfig:
    return load_config(config_path)


@pytest.fixture
def runner(pipeline_config: PipelineConfig) -> Iterator[PipelineRunner]:
    runner = PipelineRunner(pipeline_config, clock=lambda: RUN_TS)
    yield runner
    runner.archive.dispose()


@pytest.fixture
def published_run(runner: PipelineRunner) -> PipelineRunReport:
    return runner.run(REFERENCE_MONDAY)
