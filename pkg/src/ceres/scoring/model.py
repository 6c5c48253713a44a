"""Three-equation logistic model for P(IPC3+), P(IPC4+) and P(famine).

Each probability is ``sigmoid(intercept + sum(weight * feature))`` over the
eight FeatureVector inputs. The cascade caps ``p4 <= 0.70 * p3`` and then
``p5 <= 0.45 * p4`` are applied after scoring.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import numpy as np
from scipy.special import expit

from ceres.core.errors import ConfigError
from ceres.core.types import (
    DEFAULT_P4_CAP_RATIO,
    DEFAULT_P5_CAP_RATIO,
    FEATURE_NAMES,
    FeatureVector,
)

LOGGER = logging.getLogger(__name__)

COEFFICIENT_NAMES: Tuple[str, ...] = ("intercept",) + FEATURE_NAMES
EQUATION_NAMES: Tuple[str, ...] = ("ipc3plus", "ipc4plus", "famine")


@dataclass(frozen=True)
class CoefficientVector:
    intercept: float
    composite_stress: float
    ipc_stress: float
    conflict_stress: float
    drought_stress: float
    food_access_stress: float
    price_stress: float
    convergence_score: float
    n_independent_flagged: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in COEFFICIENT_NAMES], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "CoefficientVector":
        return cls(**{name: float(value) for name, value in zip(COEFFICIENT_NAMES, values)})

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], label: str) -> "CoefficientVector":
        missing = [name for name in COEFFICIENT_NAMES if name not in data]
        if missing:
            raise ConfigError(f"Coefficients '{label}' missing: {', '.join(missing)}")
        try:
            return cls(**{name: float(data[name]) for name in COEFFICIENT_NAMES})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"Coefficients '{label}' must be numeric") from exc


@dataclass(frozen=True)
class CoefficientTable:
    ipc3plus: CoefficientVector
    ipc4plus: CoefficientVector
    famine: CoefficientVector

    def matrix(self) -> np.ndarray:
        """(3, 9) matrix, rows in P3/P4/P5 order."""
        return np.vstack([getattr(self, name).as_array() for name in EQUATION_NAMES])

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "CoefficientTable":
        return cls(*(CoefficientVector.from_array(row) for row in np.asarray(matrix, dtype=float)))

    def to_dict(self) -> Dict[str, Dict[str, float]]:
        return {
            name: {field.name: getattr(getattr(self, name), field.name) for field in fields(CoefficientVector)}
            for name in EQUATION_NAMES
        }


DEFAULT_COEFFICIENTS = CoefficientTable(
    ipc3plus=CoefficientVector(-2.10, 5.80, 2.40, 1.20, 0.90, 1.10, 0.60, 2.20, 0.40),
    ipc4plus=CoefficientVector(-3.80, 4.50, 3.20, 1.80, 0.70, 0.90, 0.50, 3.10, 0.60),
    famine=CoefficientVector(-6.00, 4.00, 4.50, 2.20, 1.20, 1.60, 0.80, 4.00, 0.90),
)


@dataclass(frozen=True)
class MonotonicityBounds:
    p4_cap_ratio: float = DEFAULT_P4_CAP_RATIO
    p5_cap_ratio: float = DEFAULT_P5_CAP_RATIO

    def __post_init__(self) -> None:
        for name in ("p4_cap_ratio", "p5_cap_ratio"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly within (0, 1), got {value!r}")


@dataclass(frozen=True)
class PhaseProbabilities:
    p3: float
    p4: float
    p5: float


def sigmoid(x: Any) -> Any:
    return expit(x)


def design_row(features: FeatureVector) -> np.ndarray:
    return np.concatenate(([1.0], np.asarray(features.values(), dtype=float)))


def score_logits(features: FeatureVector, table: CoefficientTable = DEFAULT_COEFFICIENTS) -> np.ndarray:
    return table.matrix() @ design_row(features)


def score_raw(features: FeatureVector, table: CoefficientTable = DEFAULT_COEFFICIENTS) -> PhaseProbabilities:
    p3, p4, p5 = (float(value) for value in sigmoid(score_logits(features, table)))
    return PhaseProbabilities(p3, p4, p5)


def apply_monotonicity(
    raw: PhaseProbabilities,
    bounds: MonotonicityBounds = MonotonicityBounds(),
) -> PhaseProbabilities:
    """Cap P4 against P3 first, then P5 against the capped P4."""
    p4 = min(raw.p4, bounds.p4_cap_ratio * raw.p3)
    p5 = min(raw.p5, bounds.p5_cap_ratio * p4)
    return PhaseProbabilities(raw.p3, p4, p5)


def score_region(
    features: FeatureVector,
    table: CoefficientTable = DEFAULT_COEFFICIENTS,
    bounds: MonotonicityBounds = MonotonicityBounds(),
) -> PhaseProbabilities:
    return apply_monotonicity(score_raw(features, table), bounds)


def score_matrix(
    design: np.ndarray,
    table: CoefficientTable = DEFAULT_COEFFICIENTS,
    bounds: MonotonicityBounds = MonotonicityBounds(),
) -> np.ndarray:
    """Vectorized scoring of an (n, 9) design matrix; returns capped (n, 3) probabilities."""
    probabilities = sigmoid(np.asarray(design, dtype=float) @ table.matrix().T)
    p4 = np.minimum(probabilities[:, 1], bounds.p4_cap_ratio * probabilities[:, 0])
    p5 = np.minimum(probabilities[:, 2], bounds.p5_cap_ratio * p4)
    return np.column_stack((probabilities[:, 0], p4, p5))


def load_coefficients(path: str | Path | None) -> CoefficientTable:
    """Load a coefficient table from JSON, falling back to the compiled-in defaults."""
    if path is None:
        return DEFAULT_COEFFICIENTS
    source = Path(path)
    if not source.exists():
        LOGGER.warning("Coefficient file %s not found; using built-in table", source)
        return DEFAULT_COEFFICIENTS
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Coefficient file {source} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("Coefficient file root must be a mapping")
    table = CoefficientTable(
        *(CoefficientVector.from_mapping(_section(data, name), name) for name in EQUATION_NAMES)
    )
    if table != DEFAULT_COEFFICIENTS:
        LOGGER.warning("Coefficient table %s differs from the published defaults", source)
    return table


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = data.get(name)
    if not isinstance(value, dict):
        raise ConfigError(f"Coefficient section '{name}' must be a mapping")
    return value


def _assert_defaults() -> None:
    expected = np.array(
        [
            [-2.10, 5.80, 2.40, 1.20, 0.90, 1.10, 0.60, 2.20, 0.40],
            [-3.80, 4.50, 3.20, 1.80, 0.70, 0.90, 0.50, 3.10, 0.60],
            [-6.00, 4.00, 4.50, 2.20, 1.20, 1.60, 0.80, 4.00, 0.90],
        ]
    )
    if not np.array_equal(DEFAULT_COEFFICIENTS.matrix(), expected):
        raise AssertionError("Built-in coefficient table drifted from the published values")


_assert_defaults()


__all__ = [
    "DEFAULT_COEFFICIENTS",
    "COEFFICIENT_NAMES",
    "CoefficientTable",
    "CoefficientVector",
    "EQUATION_NAMES",
    "MonotonicityBounds",
    "PhaseProbabilities",
    "apply_monotonicity",
    "design_row",
    "load_coefficients",
    "score_logits",
    "score_matrix",
    "score_raw",
    "score_region",
    "sigmoid",
]
