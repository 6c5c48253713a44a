"""Configuration loading and environment overrides."""

from ceres.config.loader import (
    DEFAULT_SEED,
    IngestionConfig,
    PathsConfig,
    PipelineConfig,
    ServiceConfig,
    load_config,
    parse_config,
)
from ceres.config.settings import DEFAULT_CONFIG_PATH, LOCAL_CONFIG_PATH, CeresSettings

__all__ = [
    "CeresSettings",
    "DEFAULT_CONFIG_PATH",
    "DEFAULT_SEED",
    "IngestionConfig",
    "LOCAL_CONFIG_PATH",
    "PathsConfig",
    "PipelineConfig",
    "ServiceConfig",
    "load_config",
    "parse_config",
]
