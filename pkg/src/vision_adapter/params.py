"""
Vision adapter configuration and parameters.
"""
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np
from pydantic import Field, model_validator

from src.autodiff.layers import bind, init_attention, init_dense
from src.autodiff.node import Node
from src.core.config import ConfigModel
from src.domain.vocabulary import N_VIEWS
from src.simworld.rasterizer import C_VIS, N_PATCHES

# Token budgets swept by the compression ablation
M_IMG_GRID = (4, 8, 16, 32)


class AdapterConfig(ConfigModel):
    c_vis: int = C_VIS
    width: int = Field(default=64, ge=1)
    heads: int = Field(default=4, ge=1)
    m_img: int = Field(default=8, ge=1)
    n_patches: int = N_PATCHES

    @model_validator(mode="after")
    def _check(self):
        if self.width % self.heads:
            raise ValueError(f"width {self.width} not divisible by heads {self.heads}")
        if self.m_img > self.n_patches:
            raise ValueError(f"m_img {self.m_img} > {self.n_patches} patches (compression only)")
        return self


def init_adapter_params(rng: np.random.Generator, config: AdapterConfig, prefix: str = "adapter") -> Dict[str, np.ndarray]:
    """Fresh adapter arrays named ``{prefix}.*``."""
    w1, b1 = init_dense(rng, config.c_vis, config.width)
    w2, b2 = init_dense(rng, config.width, config.width)
    arrays = {
        f"{prefix}.W1": w1,
        f"{prefix}.b1": b1,
        f"{prefix}.W2": w2,
        f"{prefix}.b2": b2,
        f"{prefix}.q_img": rng.normal(0.0, 1.0, size=(N_VIEWS, config.m_img, config.width)),
        f"{prefix}.view_tags": rng.normal(0.0, 1.0, size=(N_VIEWS, config.width)),
    }
    arrays.update(init_attention(rng, f"{prefix}.attn", config.width))
    return arrays


@dataclass(frozen=True)
class AdapterParams:
    """Adapter tensors looked up by short name under ``prefix``."""

    tensors: Mapping[str, Node]
    prefix: str = "adapter"
    heads: int = 4

    def __getitem__(self, key: str) -> Node:
        return self.tensors[f"{self.prefix}.{key}"]

    @property
    def width(self) -> int:
        return self["W2"].shape[1]

    @property
    def m_img(self) -> int:
        return self["q_img"].shape[1]

    @classmethod
    def from_arrays(
        cls,
        arrays: Mapping[str, np.ndarray],
        prefix: str = "adapter",
        heads: int = 4,
        trainable: Optional[set] = None,
    ) -> "AdapterParams":
        return cls(tensors=bind(arrays, trainable), prefix=prefix, heads=heads)

    @classmethod
    def initialize(cls, config: AdapterConfig = AdapterConfig(), seed: int = 0, prefix: str = "adapter") -> "AdapterParams":
        arrays = init_adapter_params(np.random.default_rng(seed), config, prefix)
        return cls.from_arrays(arrays, prefix=prefix, heads=config.heads)
