"""
Inference pipeline: predicted meta-action, then the conditioned trajectory.
"""
from dataclasses import dataclass

from src.domain.types import Scene, Trajectory
from src.domain.vocabulary import MetaAction
from src.planner.config import ViewMode
from src.planner.e2e import e2e_plan
from src.planner.params import E2EParams, MetaActionEmbeddings, VlmLiteParams
from src.planner.vlm import predict_meta_action


@dataclass(frozen=True)
class InferenceResult:
    action: MetaAction
    trajectory: Trajectory


def infer(
    scene: Scene,
    vlm: VlmLiteParams,
    e2e: E2EParams,
    emb: MetaActionEmbeddings,
    views: ViewMode = "surround",
) -> InferenceResult:
    """Run both models on a copy of ``scene`` with its ground-truth future erased."""
    blind = scene.without_future()
    action = predict_meta_action(blind, vlm, views)
    return InferenceResult(action=action, trajectory=e2e_plan(blind, action, e2e, emb))
