"""
Deterministic per-view patch features: the stand-in for a camera encoder.

Each view is a 60 degree sector split into 6 angular x 6 radial bins. Patch
position lives in the channel content (channels 0-1 and 15), not in the patch
order, so downstream attention needs no positional encoding.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.domain.types import AgentState, Scene
from src.domain.vocabulary import VIEW_CENTER_DEG, VIEW_ORDER, AgentClass, TrafficLightState, View

SENSING_RANGE = 50.0
N_ANGULAR = 6
N_RADIAL = 6
N_PATCHES = N_ANGULAR * N_RADIAL
C_VIS = 16
SECTOR_DEG = 60.0
BIN_DEG = SECTOR_DEG / N_ANGULAR
BIN_M = SENSING_RANGE / N_RADIAL

# Stop line carrying the traffic light, straight ahead of the ego
LIGHT_POSITION = (20.0, 0.0)

CH_DIR_COS, CH_DIR_SIN = 0, 1
CH_COUNT = 2
CH_CLASS = {AgentClass.VEHICLE: 3, AgentClass.PEDESTRIAN: 4, AgentClass.CYCLIST: 5}
CH_MAX_SPEED = 6
CH_PROXIMITY = 7
CH_HEADING_COS, CH_HEADING_SIN = 8, 9
CH_LIGHT = {TrafficLightState.RED: 10, TrafficLightState.YELLOW: 11, TrafficLightState.GREEN: 12}
CH_MAX_LENGTH = 13
CH_AREA = 14
CH_RADIUS = 15

# Sector k covers [60k - 30, 60k + 30) degrees counter-clockwise from ahead
_SECTOR_VIEW: Dict[int, View] = {int(round(c % 360.0 / SECTOR_DEG)) % 6: v for v, c in VIEW_CENTER_DEG.items()}


@dataclass(frozen=True, eq=False)
class ViewFeatureGrid:
    """Patch features of one view, shape (N_PATCHES, C_VIS)."""

    view: View
    patches: np.ndarray

    def __post_init__(self):
        if self.patches.shape != (N_PATCHES, C_VIS):
            raise ValueError(f"{self.view.value}: patches must be {(N_PATCHES, C_VIS)}, got {self.patches.shape}")
        self.patches.setflags(write=False)


def locate(x: float, y: float) -> Tuple[View, int]:
    """(view, patch index) of a point within sensing range."""
    deg = math.degrees(math.atan2(y, x)) % 360.0
    shifted = (deg + SECTOR_DEG / 2) % 360.0
    sector = min(int(shifted // SECTOR_DEG), 5)
    angular = min(int((shifted - sector * SECTOR_DEG) // BIN_DEG), N_ANGULAR - 1)
    radial = min(int(math.hypot(x, y) // BIN_M), N_RADIAL - 1)
    return _SECTOR_VIEW[sector], angular * N_RADIAL + radial


@lru_cache(maxsize=None)
def _base_grid(view: View) -> np.ndarray:
    """Direction and radius channels, identical for every scene."""
    grid = np.zeros((N_PATCHES, C_VIS), dtype=np.float64)
    start = VIEW_CENTER_DEG[view] - SECTOR_DEG / 2
    for angular in range(N_ANGULAR):
        bearing = math.radians(start + (angular + 0.5) * BIN_DEG)
        for radial in range(N_RADIAL):
            patch = angular * N_RADIAL + radial
            grid[patch, CH_DIR_COS] = math.cos(bearing)
            grid[patch, CH_DIR_SIN] = math.sin(bearing)
            grid[patch, CH_RADIUS] = (radial + 0.5) * BIN_M / SENSING_RANGE
    grid.setflags(write=False)
    return grid


def _agent_key(agent: AgentState) -> tuple:
    # Geometry-only ordering, so sums do not depend on record order
    return (agent.x, agent.y, agent.heading, agent.speed, agent.length, agent.width, agent.agent_class.value)


def rasterize_views(scene: Scene) -> List[ViewFeatureGrid]:
    """
    Rasterize a scene into six view grids in the fixed view order.

    Agents at or beyond the sensing range are ignored. Ground-truth futures
    are never read.
    """
    grids = {view: _base_grid(view).copy() for view in VIEW_ORDER}

    for agent in sorted(scene.agents, key=_agent_key):
        r = agent.distance
        if r >= SENSING_RANGE:
            continue
        view, patch = locate(agent.x, agent.y)
        row = grids[view][patch]
        row[CH_COUNT] += 1.0
        row[CH_CLASS[agent.agent_class]] += 1.0
        row[CH_MAX_SPEED] = max(row[CH_MAX_SPEED], agent.speed / 10.0)
        row[CH_PROXIMITY] = max(row[CH_PROXIMITY], 1.0 - r / SENSING_RANGE)
        row[CH_HEADING_COS] += math.cos(agent.heading)
        row[CH_HEADING_SIN] += math.sin(agent.heading)
        row[CH_MAX_LENGTH] = max(row[CH_MAX_LENGTH], agent.length / 5.0)
        row[CH_AREA] += agent.length * agent.width / 10.0

    if scene.traffic_light is not TrafficLightState.NONE:
        view, patch = locate(*LIGHT_POSITION)
        grids[view][patch, CH_LIGHT[scene.traffic_light]] = 1.0

    return [ViewFeatureGrid(view=view, patches=grids[view]) for view in VIEW_ORDER]


def stack_views(grids: Sequence[ViewFeatureGrid]) -> np.ndarray:
    """Stack grids into an array of shape (n_views, N_PATCHES, C_VIS)."""
    return np.stack([g.patches for g in grids])
