"""Read-only REST surface over the run archive and the ledgers."""

from ceres.service.app import create_app
from ceres.service.dependencies import ServiceState

__all__ = ["ServiceState", "create_app"]
