"""
FastAPI application for the CERES public API.
"""
from __future__ import annotations

import logging
from typing import Optional

import uvicorn
from fastapi import FastAPI

from ceres import __version__
from ceres.config.loader import PipelineConfig, load_config
from ceres.config.settings import CeresSettings
from ceres.logging.structured import configure_logging
from ceres.service.api import archive, grades, health, predictions
from ceres.service.dependencies import ServiceState
from ceres.service.errors import install_error_handlers

LOGGER = logging.getLogger(__name__)


def create_app(
    config: Optional[PipelineConfig] = None,
    *,
    settings: Optional[CeresSettings] = None,
    state: Optional[ServiceState] = None,
) -> FastAPI:
    """Build the read-only API over the archive and ledgers named in the config."""
    if state is None:
        if config is None:
            settings = settings or CeresSettings()
            config = settings.apply(load_config(settings.resolve_config_path()))
        state = ServiceState.from_config(config)

    app = FastAPI(
        title="CERES API",
        description="Weekly famine early-warning hypotheses, run archive and forecast track record",
        version=__version__,
    )
    app.state.ceres = state
    install_error_handlers(app)

    app.include_router(predictions.router, prefix="/v1")
    app.include_router(archive.router, prefix="/v1/archive")
    app.include_router(grades.router, prefix="/v1/grades")
    app.include_router(health.router)

    @app.on_event("shutdown")
    def _dispose() -> None:
        state.archive.dispose()

    return app


def main() -> None:
    configure_logging()
    settings = CeresSettings()
    config = settings.apply(load_config(settings.resolve_config_path()))
    LOGGER.info(
        "Serving CERES API on %s:%d (config %s)",
        config.service.host,
        config.service.port,
        config.config_version,
        extra={"stage": "service"},
    )
    uvicorn.run(create_app(config), host=config.service.host, port=config.service.port, log_config=None)


if __name__ == "__main__":  # pragma: no cover
    main()
