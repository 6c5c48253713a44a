"""Stages 1-2: source adapters, regridding, spatial joins and weekly alignment."""

from ceres.ingestion.adapters import FixtureAdapter, build_fixture_registry, fixture_path
from ceres.ingestion.align import align_weekly, weekly_observations
from ceres.ingestion.frames import CanonicalFrame, FetchMode, GridCell, NativeCadence, Variable
from ceres.ingestion.regrid import Raster, bilinear_regrid
from ceres.ingestion.registry import AdapterDescriptor, AdapterRegistry, SourceAdapter, default_descriptor
from ceres.ingestion.spatial import JoinMode, RegionBoundary, load_regions, region_cells, spatial_join

__all__ = [
    "AdapterDescriptor",
    "AdapterRegistry",
    "CanonicalFrame",
    "FetchMode",
    "FixtureAdapter",
    "GridCell",
    "JoinMode",
    "NativeCadence",
    "Raster",
    "RegionBoundary",
    "SourceAdapter",
    "Variable",
    "align_weekly",
    "bilinear_regrid",
    "build_fixture_registry",
    "default_descriptor",
    "fixture_path",
    "load_regions",
    "region_cells",
    "spatial_join",
    "weekly_observations",
]
