"""
Environment overrides for the pipeline and the REST service.

Loads ``CERES_*`` variables (and an optional ``.env``) with pydantic settings.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ceres.config.loader import PipelineConfig, ServiceConfig

DEFAULT_CONFIG_PATH = "config/ceres.yaml"
LOCAL_CONFIG_PATH = "config/local.yaml"


class CeresSettings(BaseSettings):
    """Settings loaded from ``CERES_``-prefixed environment variables."""

    config: Optional[str] = Field(default=None, description="Pipeline config path")
    fixture_root: Optional[str] = Field(default=None, description="Overrides paths.fixture_root")
    archive_path: Optional[str] = Field(default=None, description="Overrides paths.archive_path")
    ledger_dir: Optional[str] = Field(default=None, description="Overrides paths.ledger_dir")
    host: Optional[str] = None
    port: Optional[int] = Field(default=None, ge=1, le=65535)

    model_config = SettingsConfigDict(
        env_prefix="CERES_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def resolve_config_path(self, explicit: Optional[str] = None) -> Path:
        """Explicit path, else ``CERES_CONFIG``, else local.yaml when present, else ceres.yaml."""
        if explicit:
            return Path(explicit)
        if self.config:
            return Path(self.config)
        local = Path(LOCAL_CONFIG_PATH)
        return local if local.exists() else Path(DEFAULT_CONFIG_PATH)

    def apply(self, config: PipelineConfig) -> PipelineConfig:
        paths = config.paths
        if self.fixture_root:
            paths = replace(paths, fixture_root=Path(self.fixture_root))
        if self.archive_path:
            paths = replace(paths, archive_path=Path(self.archive_path))
        if self.ledger_dir:
            paths = replace(paths, ledger_dir=Path(self.ledger_dir))
        service = ServiceConfig(
            host=self.host or config.service.host,
            port=self.port or config.service.port,
        )
        return replace(config, paths=paths, service=service)


__all__ = ["CeresSettings", "DEFAULT_CONFIG_PATH", "LOCAL_CONFIG_PATH"]
