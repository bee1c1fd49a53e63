"""
Teacher-forced E2E-lite training: the decoder is conditioned on ground-truth
meta-actions derived from each scene's own future.
"""
from typing import Dict, List, Sequence

import numpy as np

from src.autodiff import ops
from src.autodiff.adam import AdamState, adam_step
from src.autolabel.rules import DEFAULT_THRESHOLDS, LabelThresholds, derive_meta_action
from src.core.exceptions import ConfigError
from src.core.logging_config import app_logger
from src.domain.types import Scene
from src.planner.checkpoint import Checkpoint
from src.planner.e2e import TRAJ_SCALE, e2e_forward_batch
from src.planner.features import scene_batch
from src.planner.params import E2EParams
from src.training.config import E2ETrainConfig


def ground_truth_actions(scenes: Sequence[Scene], th: LabelThresholds = DEFAULT_THRESHOLDS) -> np.ndarray:
    """Joint meta-action index of every scene's ground-truth future."""
    missing = [s.scene_id for s in scenes if s.ego_future is None]
    if missing:
        raise ConfigError(f"{len(missing)} scenes have no ego_future (first: {missing[0]})")
    return np.array([derive_meta_action(s.ego_future, th).index for s in scenes], dtype=np.int64)


def train_e2e(
    checkpoint: Checkpoint,
    scenes: Sequence[Scene],
    config: E2ETrainConfig = E2ETrainConfig(),
    th: LabelThresholds = DEFAULT_THRESHOLDS,
) -> tuple:
    """
    Fit E2E-lite and the meta-action embeddings to the ground-truth futures.

    Args:
        checkpoint: Holds ``e2e.*`` and ``emb.e_act``
        scenes: Training scenes with ego_future
        config: Epochs, learning rate, batch size, seed and conditioning
        th: Thresholds used to derive the ground-truth actions

    Returns:
        (new checkpoint, per-epoch loss records)
    """
    if not scenes:
        raise ConfigError("E2E training needs at least one scene")
    actions = ground_truth_actions(scenes, th)
    futures = np.stack([s.ego_future.as_array() for s in scenes]) / TRAJ_SCALE
    data = scene_batch([s.without_future() for s in scenes])

    params = E2EParams.from_checkpoint(checkpoint)
    arrays = dict(params.arrays)
    trainable = set(arrays)
    app_logger.info(
        f"E2E training on {len(scenes)} scenes for {config.epochs} epochs (conditioning={config.conditioning})"
    )

    rng = np.random.default_rng(config.seed)
    state = AdamState()
    losses: List[Dict] = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(scenes))
        total, batches = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            idx = order[start:start + config.batch_size]
            current = E2EParams(arrays=arrays, config=params.config)
            tensors = current.tensors(trainable)
            conditioning = actions[idx] if config.conditioning == "gt" else None
            planned = e2e_forward_batch(data.take(idx), current, conditioning, tensors=tensors)
            loss = ops.mse(planned, futures[idx])
            loss.backward()

            grads = {name: tensors[name].grad for name in sorted(trainable)}
            arrays, state = adam_step(arrays, grads, state, lr=config.lr)
            total += loss.item()
            batches += 1

        mean_loss = total / batches
        losses.append({"epoch": epoch, "stage": "e2e", "loss": mean_loss})
        app_logger.debug(f"e2e epoch {epoch}/{config.epochs}: loss={mean_loss:.6f}")

    meta = {**checkpoint.meta, "e2e_conditioning": config.conditioning}
    updated = Checkpoint(params={**checkpoint.params, **arrays}, meta=meta)
    app_logger.info(f"✅ E2E training finished: final loss {losses[-1]['loss']:.6f}")
    return updated, losses
