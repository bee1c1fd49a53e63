"""
Three-stage VLM-lite training: mix pre-training, driving fine-tuning and
planning fine-tuning, each with its own trainable parameter prefixes.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence

import numpy as np

from src.autodiff import ops
from src.autodiff.adam import AdamState, adam_step
from src.autodiff.node import Node
from src.core.exceptions import ConfigError
from src.core.logging_config import app_logger
from src.domain.types import QARecord, Scene
from src.domain.vocabulary import N_LON
from src.planner.checkpoint import Checkpoint
from src.planner.config import view_ids
from src.planner.features import SceneBatch, scene_batch
from src.planner.params import VlmLiteParams
from src.planner.vlm import vlm_forward_batch
from src.training.config import LOSS_TERM_SOURCES, STAGE_ORDER, StageConfig
from src.training.targets import Target, build_targets


@dataclass(frozen=True, eq=False)
class TrainingData:
    """Rasterized scenes with their QA-derived targets, row-aligned."""

    batch: SceneBatch
    targets: Dict[str, Target]

    def __len__(self) -> int:
        return len(self.batch)


def prepare_data(scenes: Sequence[Scene], qas: Sequence[QARecord]) -> TrainingData:
    if not scenes:
        raise ConfigError("training needs at least one scene")
    return TrainingData(batch=scene_batch([s.without_future() for s in scenes]), targets=build_targets(scenes, qas))


def freeze_mask(names, trainable: Sequence[str]) -> Dict[str, bool]:
    """Parameter name -> True when frozen (matches none of the trainable prefixes)."""
    prefixes = tuple(trainable)
    return {name: not name.startswith(prefixes) for name in sorted(names)}


def recon_target(views: np.ndarray, mode: str) -> np.ndarray:
    """Mean raster feature vector over the input views and patches, (B, C_vis)."""
    return views[:, view_ids(mode)].mean(axis=(1, 2))


def _term_loss(name: str, outputs: Mapping[str, Node], targets: Mapping[str, Target], batch: SceneBatch, views: str) -> Node:
    if name == "recon":
        return ops.mse(outputs["recon"], recon_target(batch.views, views))
    target = targets[name]
    labels = target.values.astype(np.int64)
    if name == "vru":
        return ops.mse(outputs["vru"], target.values.reshape(-1, 1), weights=target.mask)
    if name == "plan":
        lateral = ops.cross_entropy(outputs["lateral"], labels // N_LON, weights=target.mask)
        longitudinal = ops.cross_entropy(outputs["longitudinal"], labels % N_LON, weights=target.mask)
        return ops.add(lateral, longitudinal)
    head = {"density": "density", "probe_light": "probe_light", "traffic_light": "light", "motion": "motion"}[name]
    return ops.cross_entropy(outputs[head], labels, weights=target.mask)


def stage_loss(cfg: StageConfig, outputs: Mapping[str, Node], targets: Mapping[str, Target], batch: SceneBatch) -> Node:
    """Weighted sum of the stage's loss terms, in sorted term order."""
    return ops.weighted_sum(
        [(cfg.loss_terms[name], _term_loss(name, outputs, targets, batch, cfg.views)) for name in sorted(cfg.loss_terms)]
    )


def _check_data(cfg: StageConfig, data: TrainingData) -> None:
    for name in sorted(cfg.loss_terms):
        source = LOSS_TERM_SOURCES[name]
        if source is not None and data.targets[name].count == 0:
            raise ConfigError(
                f"stage '{cfg.stage}' needs '{source.value}' QA records for loss term '{name}', found none"
            )


def train_stage(cfg: StageConfig, checkpoint: Checkpoint, data: TrainingData) -> tuple:
    """
    Run one stage on prepared data.

    Args:
        cfg: Stage configuration
        checkpoint: Parameters before the stage
        data: Prepared training data

    Returns:
        (new checkpoint, per-epoch loss records)
    """
    if len(data) == 0:
        raise ConfigError("training needs at least one scene")
    _check_data(cfg, data)

    params = VlmLiteParams.from_checkpoint(checkpoint)
    arrays = dict(params.arrays)
    mask = freeze_mask(arrays, cfg.trainable)
    trainable = {name for name, frozen in mask.items() if not frozen}
    if not trainable:
        raise ConfigError(f"stage '{cfg.stage}': no parameter matches {list(cfg.trainable)}")

    app_logger.info(
        f"Stage {cfg.stage}: {len(trainable)}/{len(mask)} VLM tensors trainable, "
        f"terms {sorted(cfg.loss_terms)}, {len(data)} scenes, views={cfg.views}"
    )

    rng = np.random.default_rng(cfg.seed)
    state = AdamState()
    losses: List[Dict] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(data))
        total, batches = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            batch = data.batch.take(idx)
            targets = {name: target.take(idx) for name, target in data.targets.items()}

            current = VlmLiteParams(arrays=arrays, config=params.config)
            tensors = current.tensors(trainable)
            outputs = vlm_forward_batch(batch, current, tensors=tensors, views=cfg.views)
            loss = stage_loss(cfg, outputs, targets, batch)
            loss.backward()

            grads = {name: tensors[name].grad for name in sorted(trainable)}
            arrays, state = adam_step(arrays, grads, state, lr=cfg.lr)
            total += loss.item()
            batches += 1

        mean_loss = total / batches
        losses.append({"epoch": epoch, "stage": cfg.stage, "loss": mean_loss})
        app_logger.debug(f"{cfg.stage} epoch {epoch}/{cfg.epochs}: loss={mean_loss:.6f}")

    meta = dict(checkpoint.meta)
    meta["stages"] = list(meta.get("stages", [])) + [cfg.stage]
    updated = Checkpoint(params={**checkpoint.params, **arrays}, meta=meta)
    app_logger.info(f"✅ Stage {cfg.stage} finished: final loss {losses[-1]['loss']:.6f}")
    return updated, losses


def run_stage(cfg: StageConfig, checkpoint: Checkpoint, scenes: Sequence[Scene], qas: Sequence[QARecord]) -> tuple:
    """Run one stage; returns (new checkpoint, per-epoch loss records)."""
    return train_stage(cfg, checkpoint, prepare_data(scenes, qas))


@dataclass
class ThreeStageResult:
    checkpoint: Checkpoint
    per_stage: Dict[str, Checkpoint] = field(default_factory=dict)
    losses: List[Dict] = field(default_factory=list)


def check_stage_order(stages: Sequence[StageConfig]) -> None:
    if not stages:
        raise ConfigError("no stages selected")
    ranks = [STAGE_ORDER.index(cfg.stage) for cfg in stages]
    if ranks != sorted(set(ranks)):
        raise ConfigError(f"stages must run once each in order {list(STAGE_ORDER)}, got {[c.stage for c in stages]}")


def run_three_stage(
    stages: Sequence[StageConfig],
    checkpoint: Checkpoint,
    scenes: Sequence[Scene],
    qas: Sequence[QARecord],
) -> ThreeStageResult:
    """
    Run the selected stages in order, each starting from the previous result.

    A subset (e.g. stages 1-2 only) is allowed; parameters a skipped stage
    would have trained stay at their incoming values.
    """
    check_stage_order(stages)
    data = prepare_data(scenes, qas)
    for cfg in stages:
        _check_data(cfg, data)

    result = ThreeStageResult(checkpoint=checkpoint)
    for cfg in stages:
        result.checkpoint, losses = train_stage(cfg, result.checkpoint, data)
        result.per_stage[cfg.stage] = result.checkpoint
        result.losses.extend(losses)
    return result
