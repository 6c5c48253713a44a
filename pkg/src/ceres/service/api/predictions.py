"""
Latest predictions and single-hypothesis lookups.
"""
from __future__ import annotations

from typing import List

from fastapi import APIRouter, Depends, Path

from ceres.core.serialization import hypothesis_to_dict
from ceres.core.types import FamineHypothesis
from ceres.service.dependencies import ServiceState, get_state
from ceres.service.errors import not_found
from ceres.service.schemas import HypothesisOut

router = APIRouter(tags=["predictions"])


def _latest(state: ServiceState) -> List[FamineHypothesis]:
    run, hypotheses = state.archive.latest()
    if run is None:
        raise not_found("no-runs", "no completed run has been archived yet")
    return hypotheses


def _out(hypotheses: List[FamineHypothesis]) -> List[HypothesisOut]:
    return [HypothesisOut.model_validate(hypothesis_to_dict(h)) for h in hypotheses]


@router.get("/predictions", response_model=List[HypothesisOut])
def list_predictions(state: ServiceState = Depends(get_state)) -> List[HypothesisOut]:
    """Newest run's hypotheses, ranked by tier, then P(IPC4+), then ISO3."""
    return _out(_latest(state))


@router.get("/hypotheses", response_model=List[HypothesisOut])
def list_hypotheses(state: ServiceState = Depends(get_state)) -> List[HypothesisOut]:
    return _out(_latest(state))


@router.get("/predictions/{region_id}", response_model=HypothesisOut)
def region_prediction(
    region_id: str = Path(pattern=r"^[A-Z]{3}$"),
    state: ServiceState = Depends(get_state),
) -> HypothesisOut:
    for hypothesis in _latest(state):
        if hypothesis.region_id == region_id:
            return HypothesisOut.model_validate(hypothesis_to_dict(hypothesis))
    raise not_found("unknown-region", f"no prediction for {region_id} in the latest run")


@router.get("/hypotheses/{hypothesis_id}", response_model=HypothesisOut)
def get_hypothesis(
    hypothesis_id: str = Path(pattern=r"^CERES-HYP-[A-Z]{3}-\d{8}-[0-9A-F]{6}$"),
    state: ServiceState = Depends(get_state),
) -> HypothesisOut:
    hypothesis = state.archive.find_hypothesis(hypothesis_id) or state.hypotheses.find(hypothesis_id)
    if hypothesis is None:
        raise not_found("unknown-hypothesis", f"hypothesis {hypothesis_id} was never issued")
    return HypothesisOut.model_validate(hypothesis_to_dict(hypothesis))
