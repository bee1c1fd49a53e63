"""
E2E-lite trajectory decoder and the meta-action encoder.

Planning tokens cross-attend over [scene tokens; e_nav; e_act; ego status] and
a linear head maps the concatenated tokens to T waypoints.
"""
from typing import Mapping, Optional, Sequence

import numpy as np

from src.autodiff import ops
from src.autodiff.layers import cross_attention_block, dense
from src.autodiff.node import Node
from src.domain.types import Scene, Trajectory
from src.domain.vocabulary import N_VIEWS, T_STEPS, MetaAction, meta_action_index
from src.planner.features import SceneBatch, scene_batch
from src.planner.params import EMB_NAME, E2EParams, MetaActionEmbeddings
from src.planner.vlm import ego_token
from src.vision_adapter.adapter import encode_views

# Head outputs are waypoints in units of TRAJ_SCALE meters
TRAJ_SCALE = 10.0


def encode_meta_action(action: MetaAction, emb: MetaActionEmbeddings) -> np.ndarray:
    """e_act: the row of E_act at the action's joint index."""
    return emb.e_act[meta_action_index(action)].copy()


def e2e_forward_batch(
    batch: SceneBatch,
    params: E2EParams,
    action_indices: Optional[Sequence[int]],
    tensors: Optional[Mapping[str, Node]] = None,
) -> Node:
    """
    Planned waypoints (B, T, 2) in TRAJ_SCALE units.

    ``action_indices`` of None conditions on a zero e_act (no planning
    information).
    """
    tensors = tensors if tensors is not None else params.tensors()
    config = params.config
    n, width = len(batch), config.width
    ids = list(range(N_VIEWS))

    memory = [
        encode_views(batch.views, ids, params.adapter(tensors)),
        ops.reshape(ops.take_rows(tensors["e2e.nav"], batch.nav), (n, 1, width)),
    ]
    if action_indices is None:
        memory.append(Node.constant(np.zeros((n, 1, width))))
    else:
        picked = ops.take_rows(tensors[EMB_NAME], np.asarray(action_indices, dtype=np.int64))
        memory.append(ops.reshape(picked, (n, 1, width)))
    if config.e2e_ego_status:
        memory.append(ego_token(batch.ego_speed, tensors, "e2e.ego"))
    memory = ops.concat(memory, axis=1)

    tokens = ops.broadcast_to(
        ops.reshape(tensors["e2e.plan_tokens"], (1, config.plan_tokens, width)), (n, config.plan_tokens, width)
    )
    for i in range(config.decoder_layers):
        tokens = cross_attention_block(tokens, memory, tensors, f"e2e.dec.{i}", config.heads)
    flat = ops.reshape(tokens, (n, config.plan_tokens * width))
    return ops.reshape(dense(flat, tensors, "e2e.head"), (n, T_STEPS, 2))


def plan_batch(batch: SceneBatch, params: E2EParams, action_indices: Optional[Sequence[int]]) -> np.ndarray:
    """Planned waypoints (B, T, 2) in meters."""
    return e2e_forward_batch(batch, params, action_indices).value * TRAJ_SCALE


def with_embeddings(params: E2EParams, emb: MetaActionEmbeddings) -> E2EParams:
    return E2EParams(arrays={**params.arrays, EMB_NAME: emb.e_act}, config=params.config)


def e2e_plan(scene: Scene, action: MetaAction, params: E2EParams, emb: MetaActionEmbeddings) -> Trajectory:
    """Plan a trajectory for one scene conditioned on ``action``."""
    combined = with_embeddings(params, emb)
    waypoints = plan_batch(scene_batch([scene.without_future()]), combined, [meta_action_index(action)])
    return Trajectory.from_array(waypoints[0])
