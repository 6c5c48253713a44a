"""Hypothesis id minting: CERES-HYP-{ISO3}-{YYYYMMDD}-{6 hex}."""

from __future__ import annotations

from datetime import date

from ceres.core.serialization import sha256_hex
from ceres.core.types import RegionId

ID_PREFIX = "CERES-HYP"
DIGEST_CHARS = 6


def mint_hypothesis_id(region: str, reference_date: date, payload: str) -> str:
    """``payload`` is the canonical hypothesis body without id and created_at."""
    iso3 = RegionId(region)
    suffix = sha256_hex(payload)[:DIGEST_CHARS].upper()
    return f"{ID_PREFIX}-{iso3}-{reference_date.strftime('%Y%m%d')}-{suffix}"


__all__ = ["ID_PREFIX", "mint_hypothesis_id"]
