"""
Model inputs derived from scenes: raster stacks, nav indices and ego speed.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.domain.types import Scene
from src.domain.vocabulary import N_VIEWS, NAV_ORDER
from src.simworld.rasterizer import C_VIS, N_PATCHES, rasterize_views, stack_views


@dataclass(frozen=True, eq=False)
class SceneBatch:
    views: np.ndarray  # (B, 6, P, C_vis)
    nav: np.ndarray  # (B,)
    ego_speed: np.ndarray  # (B,)

    def __len__(self) -> int:
        return self.views.shape[0]

    def take(self, indices) -> "SceneBatch":
        idx = np.asarray(indices, dtype=np.int64)
        return SceneBatch(views=self.views[idx], nav=self.nav[idx], ego_speed=self.ego_speed[idx])


def scene_batch(scenes: Sequence[Scene]) -> SceneBatch:
    """Rasterize scenes into one batch. Ground-truth futures are not read."""
    if not scenes:
        return SceneBatch(views=np.zeros((0, N_VIEWS, N_PATCHES, C_VIS)), nav=np.zeros(0, dtype=np.int64), ego_speed=np.zeros(0))
    return SceneBatch(
        views=np.stack([stack_views(rasterize_views(s)) for s in scenes]),
        nav=np.array([NAV_ORDER.index(s.nav_command) for s in scenes], dtype=np.int64),
        ego_speed=np.array([s.ego.speed for s in scenes], dtype=np.float64),
    )
