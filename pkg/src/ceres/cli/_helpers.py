"""Shared utilities for CLI entrypoints."""

from __future__ import annotations

import argparse
from datetime import date
from typing import Optional

from ceres.config.loader import PipelineConfig, load_config
from ceres.config.settings import DEFAULT_CONFIG_PATH, LOCAL_CONFIG_PATH, CeresSettings
from ceres.core.errors import ConfigError
from ceres.logging.structured import configure_logging as _configure_structured

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_USAGE = 2


def add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        dest="config",
        default=None,
        help=(
            "Path to YAML config file (default: CERES_CONFIG, else "
            f"{LOCAL_CONFIG_PATH} if present, else {DEFAULT_CONFIG_PATH})"
        ),
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Enable debug logging for troubleshooting",
    )


def configure_logging(verbose: bool) -> None:
    _configure_structured(verbose)


def iso_date(value: str) -> date:
    """argparse type for YYYY-MM-DD arguments."""
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {value!r}") from exc


def load_cli_config(config_path: Optional[str], settings: Optional[CeresSettings] = None) -> PipelineConfig:
    settings = settings or CeresSettings()
    resolved = settings.resolve_config_path(config_path)
    try:
        return settings.apply(load_config(resolved))
    except ConfigError as exc:
        raise SystemExit(f"Config validation failed: {exc}") from exc


__all__ = [
    "EXIT_FATAL",
    "EXIT_OK",
    "EXIT_USAGE",
    "add_common_args",
    "configure_logging",
    "iso_date",
    "load_cli_config",
]
