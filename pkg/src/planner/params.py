"""
Parameter sets of the two models and the meta-action embeddings.

Names are namespaced: ``vlm.*`` for VLM-lite, ``e2e.*`` for E2E-lite and
``emb.e_act`` for the meta-action encoder table.
"""
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np

from src.autodiff.layers import bind, init_block, init_dense
from src.autodiff.node import Node
from src.core.exceptions import ConfigError, NumericError
from src.domain.vocabulary import N_ACT, N_LAT, N_LON, NAV_ORDER, T_STEPS, TRAFFIC_LIGHT_ORDER
from src.planner.checkpoint import Checkpoint
from src.planner.config import ModelConfig
from src.simworld.rasterizer import C_VIS
from src.vision_adapter.params import AdapterParams, init_adapter_params

VLM_PREFIX = "vlm."
E2E_PREFIX = "e2e."
EMB_NAME = "emb.e_act"

# Classifier heads over the pooled trunk output: name -> output size
VLM_HEADS = {
    "vlm.head.lat": N_LAT,
    "vlm.head.lon": N_LON,
    "vlm.aux.light": len(TRAFFIC_LIGHT_ORDER),
    "vlm.aux.vru": 1,
    "vlm.aux.motion": N_ACT,
    "vlm.probe.density": 3,
    "vlm.probe.light": len(TRAFFIC_LIGHT_ORDER),
    "vlm.probe.recon": C_VIS,
}


def _rng(config: ModelConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, stream])


def init_vlm_params(config: ModelConfig) -> Dict[str, np.ndarray]:
    rng = _rng(config, 0)
    arrays = init_adapter_params(rng, config.adapter_config(), prefix="vlm.adapter")
    arrays["vlm.text.nav"] = rng.normal(0.0, 1.0, size=(len(NAV_ORDER), config.width))
    if config.vlm_ego_status:
        arrays["vlm.ego.W"], arrays["vlm.ego.b"] = init_dense(rng, 1, config.width)
    for i in range(config.trunk_layers):
        arrays.update(init_block(rng, f"vlm.trunk.{i}", config.width, config.ff_hidden))
    # Zero heads: untrained predictions are uniform
    for name, size in VLM_HEADS.items():
        arrays[f"{name}.W"] = np.zeros((config.width, size))
        arrays[f"{name}.b"] = np.zeros(size)
    return arrays


def init_e2e_params(config: ModelConfig) -> Dict[str, np.ndarray]:
    rng = _rng(config, 1)
    arrays = init_adapter_params(rng, config.adapter_config(), prefix="e2e.adapter")
    arrays["e2e.nav"] = rng.normal(0.0, 1.0, size=(len(NAV_ORDER), config.width))
    arrays["e2e.plan_tokens"] = rng.normal(0.0, 1.0, size=(config.plan_tokens, config.width))
    if config.e2e_ego_status:
        arrays["e2e.ego.W"], arrays["e2e.ego.b"] = init_dense(rng, 1, config.width)
    for i in range(config.decoder_layers):
        arrays.update(init_block(rng, f"e2e.dec.{i}", config.width, config.ff_hidden))
    arrays["e2e.head.W"], arrays["e2e.head.b"] = init_dense(
        rng, config.plan_tokens * config.width, T_STEPS * 2, gain=0.1
    )
    return arrays


def init_action_embeddings(config: ModelConfig) -> np.ndarray:
    return _rng(config, 2).normal(0.0, 1.0, size=(N_ACT, config.width))


def init_checkpoint(config: ModelConfig) -> Checkpoint:
    """Fresh parameters for both models and the embedding table."""
    params = init_vlm_params(config)
    params.update(init_e2e_params(config))
    params[EMB_NAME] = init_action_embeddings(config)
    return Checkpoint(params=params, meta={"model": config.model_dump()})


def _check_finite(arrays: Mapping[str, np.ndarray]) -> None:
    for name in sorted(arrays):
        if not np.all(np.isfinite(arrays[name])):
            raise NumericError(f"parameter {name} has non-finite values")


@dataclass(frozen=True, eq=False)
class _ModelParams:
    arrays: Dict[str, np.ndarray]
    config: ModelConfig

    prefix = ""
    includes = ()

    def tensors(self, trainable: Optional[set] = None) -> Dict[str, Node]:
        return bind(self.arrays, trainable)

    def adapter(self, tensors: Mapping[str, Node]) -> AdapterParams:
        return AdapterParams(tensors=tensors, prefix=f"{self.prefix}adapter", heads=self.config.heads)

    def check_finite(self) -> None:
        _check_finite(self.arrays)

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint):
        ckpt.require(cls.prefix)
        config = ModelConfig(**ckpt.meta.get("model", {}))
        return cls(arrays=ckpt.select(cls.includes), config=config)


class VlmLiteParams(_ModelParams):
    """VLM-lite parameters (``vlm.*``)."""

    prefix = VLM_PREFIX
    includes = (VLM_PREFIX,)

    @classmethod
    def initialize(cls, config: ModelConfig = ModelConfig()) -> "VlmLiteParams":
        return cls(arrays=init_vlm_params(config), config=config)


class E2EParams(_ModelParams):
    """E2E-lite parameters (``e2e.*``), plus the embedding table when present."""

    prefix = E2E_PREFIX
    includes = (E2E_PREFIX, EMB_NAME)

    @classmethod
    def initialize(cls, config: ModelConfig = ModelConfig()) -> "E2EParams":
        arrays = init_e2e_params(config)
        arrays[EMB_NAME] = init_action_embeddings(config)
        return cls(arrays=arrays, config=config)


@dataclass(frozen=True, eq=False)
class MetaActionEmbeddings:
    """Learnable table E_act, one row per joint meta-action."""

    e_act: np.ndarray

    def __post_init__(self):
        if self.e_act.ndim != 2 or self.e_act.shape[0] != N_ACT:
            raise ConfigError(f"E_act must have {N_ACT} rows, got shape {self.e_act.shape}")

    @property
    def dim(self) -> int:
        return self.e_act.shape[1]

    @classmethod
    def initialize(cls, config: ModelConfig = ModelConfig()) -> "MetaActionEmbeddings":
        return cls(e_act=init_action_embeddings(config))

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "MetaActionEmbeddings":
        if EMB_NAME not in ckpt.params:
            raise ConfigError(f"checkpoint has no '{EMB_NAME}'")
        return cls(e_act=ckpt.params[EMB_NAME])
