"""
VLM-lite: multi-view tokens plus a nav text token through a small transformer
trunk, with meta-action heads and auxiliary scene heads on the pooled output.
"""
from collections import Counter
from typing import Dict, List, Mapping, Optional

import numpy as np

from src.autodiff import ops
from src.autodiff.layers import dense, self_attention_block
from src.autodiff.node import Node
from src.autolabel.templates import render_description
from src.domain.types import Scene
from src.domain.vocabulary import LATERAL_ORDER, LONGITUDINAL_ORDER, TRAFFIC_LIGHT_ORDER, MetaAction
from src.planner.config import ViewMode, view_ids
from src.planner.features import SceneBatch, scene_batch
from src.planner.params import VlmLiteParams
from src.vision_adapter.adapter import encode_views

# Incremented by every meta-action prediction; lets tests prove a code path never predicts
call_counts: Counter = Counter()

# Output name -> head parameter prefix
OUTPUT_HEADS = {
    "lateral": "vlm.head.lat",
    "longitudinal": "vlm.head.lon",
    "light": "vlm.aux.light",
    "vru": "vlm.aux.vru",
    "motion": "vlm.aux.motion",
    "density": "vlm.probe.density",
    "probe_light": "vlm.probe.light",
    "recon": "vlm.probe.recon",
}


def ego_token(speed: np.ndarray, tensors: Mapping[str, Node], prefix: str) -> Node:
    """(B,) speeds -> (B, 1, C) status token."""
    return dense(np.asarray(speed, dtype=np.float64).reshape(-1, 1, 1) / 10.0, tensors, prefix)


def vlm_forward_batch(
    batch: SceneBatch,
    params: VlmLiteParams,
    tensors: Optional[Mapping[str, Node]] = None,
    views: ViewMode = "surround",
) -> Dict[str, Node]:
    """
    Forward pass over a batch.

    Args:
        batch: Rasterized scenes
        params: Model parameters (config and arrays)
        tensors: Bound parameter nodes; constants from ``params`` when omitted
        views: Surround (all six views) or front-only input

    Returns:
        Output nodes keyed by OUTPUT_HEADS, each (B, k)
    """
    tensors = tensors if tensors is not None else params.tensors()
    ids = view_ids(views)
    width = params.config.width
    image = encode_views(batch.views[:, ids], ids, params.adapter(tensors))
    text = ops.reshape(ops.take_rows(tensors["vlm.text.nav"], batch.nav), (len(batch), 1, width))
    parts = [image, text]
    if params.config.vlm_ego_status:
        parts.append(ego_token(batch.ego_speed, tensors, "vlm.ego"))
    x = ops.concat(parts, axis=1)
    for i in range(params.config.trunk_layers):
        x = self_attention_block(x, tensors, f"vlm.trunk.{i}", params.config.heads)
    pooled = ops.mean_pool(x, axis=1)
    return {name: dense(pooled, tensors, prefix) for name, prefix in OUTPUT_HEADS.items()}


def vlm_forward(scene: Scene, params: VlmLiteParams, views: ViewMode = "surround") -> Dict[str, np.ndarray]:
    """Logits (and the scalar VRU estimate) for one scene."""
    params.check_finite()
    outputs = vlm_forward_batch(scene_batch([scene.without_future()]), params, views=views)
    return {name: node.value[0] for name, node in outputs.items()}


def action_from_logits(lateral_logits, longitudinal_logits) -> MetaAction:
    """Independent argmax per head; ties go to the lower index."""
    return MetaAction(
        lateral=LATERAL_ORDER[int(np.argmax(lateral_logits))],
        longitudinal=LONGITUDINAL_ORDER[int(np.argmax(longitudinal_logits))],
    )


def predict_meta_action(scene: Scene, params: VlmLiteParams, views: ViewMode = "surround") -> MetaAction:
    call_counts["predict_meta_action"] += 1
    logits = vlm_forward(scene, params, views)
    return action_from_logits(logits["lateral"], logits["longitudinal"])


def predict_batch(batch: SceneBatch, params: VlmLiteParams, views: ViewMode = "surround") -> Dict[str, np.ndarray]:
    """Raw outputs for a batch, as arrays."""
    call_counts["predict_meta_action"] += 1
    return {name: node.value for name, node in vlm_forward_batch(batch, params, views=views).items()}


def actions_from_outputs(outputs: Mapping[str, np.ndarray]) -> List[MetaAction]:
    return [action_from_logits(lat, lon) for lat, lon in zip(outputs["lateral"], outputs["longitudinal"])]


def describe_from_outputs(outputs: Mapping[str, np.ndarray], row: int) -> str:
    """Scene description filled from predicted attributes (canonical variant)."""
    density = int(np.argmax(outputs["density"][row]))
    light = TRAFFIC_LIGHT_ORDER[int(np.argmax(outputs["light"][row]))]
    vru_count = max(0, int(round(float(outputs["vru"][row, 0]))))
    return render_description(density, light, vru_count)
