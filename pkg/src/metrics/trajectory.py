"""
Open-loop trajectory metrics: L2 displacement at 1s/2s/3s and collision rate.
"""
import math
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import ArityError
from src.domain.geometry import EGO_LENGTH, EGO_WIDTH, box_corners, polygons_overlap
from src.domain.types import Scene, Trajectory
from src.domain.vocabulary import HORIZON_STEPS, T_STEPS

L2Mode = Literal["at_step", "averaged"]
HORIZONS = tuple(HORIZON_STEPS)


def _with_avg(values: Dict[str, float]) -> Dict[str, float]:
    values["avg"] = sum(values[h] for h in HORIZONS) / len(HORIZONS)
    return values


def l2_horizons(pred: Trajectory, gt: Trajectory, mode: L2Mode = "at_step") -> Dict[str, float]:
    """
    Displacement error per horizon.

    ``at_step`` takes the distance at waypoints 2, 4 and 6; ``averaged``
    averages the distances of every waypoint up to the horizon.
    """
    p, g = pred.as_array(), gt.as_array()
    if p.shape != g.shape or len(p) != T_STEPS:
        raise ArityError(f"trajectory lengths differ or are not {T_STEPS}: {len(p)} vs {len(g)}")
    dist = np.linalg.norm(p - g, axis=1)
    if mode == "averaged":
        return _with_avg({h: float(dist[:k].mean()) for h, k in HORIZON_STEPS.items()})
    return _with_avg({h: float(dist[k - 1]) for h, k in HORIZON_STEPS.items()})


def mean_l2(preds: Sequence[Trajectory], gts: Sequence[Trajectory], mode: L2Mode = "at_step") -> Dict[str, float]:
    if len(preds) != len(gts):
        raise ArityError(f"{len(preds)} predictions for {len(gts)} ground truths")
    if not preds:
        raise ArityError("no trajectories to score")
    rows = [l2_horizons(p, g, mode) for p, g in zip(preds, gts)]
    return {key: sum(r[key] for r in rows) / len(rows) for key in rows[0]}


def path_headings(start: Tuple[float, float], start_heading: float, points) -> List[float]:
    """Heading of each step from its displacement; zero-length steps keep the previous heading."""
    headings = []
    px, py = start
    heading = start_heading
    for x, y in points:
        dx, dy = x - px, y - py
        if dx != 0.0 or dy != 0.0:
            heading = math.atan2(dy, dx)
        headings.append(heading)
        px, py = x, y
    return headings


def first_collision_step(
    pred: Trajectory, scene: Scene, ego_dims: Tuple[float, float] = (EGO_LENGTH, EGO_WIDTH)
) -> Optional[int]:
    """Index of the first waypoint where the ego footprint overlaps an agent, or None."""
    if len(pred.waypoints) != T_STEPS:
        raise ArityError(f"planned trajectory has {len(pred.waypoints)} waypoints, expected {T_STEPS}")
    ego_headings = path_headings((0.0, 0.0), 0.0, pred.waypoints)
    agent_paths = [(a, path_headings((a.x, a.y), a.heading, a.future)) for a in scene.agents]
    for step, ((x, y), heading) in enumerate(zip(pred.waypoints, ego_headings)):
        ego = box_corners(x, y, heading, *ego_dims)
        for agent, headings in agent_paths:
            ax, ay = agent.future[step]
            if polygons_overlap(ego, box_corners(ax, ay, headings[step], agent.length, agent.width)):
                return step
    return None


def collision_rate(
    preds: Sequence[Trajectory],
    scenes: Sequence[Scene],
    ego_dims: Tuple[float, float] = (EGO_LENGTH, EGO_WIDTH),
) -> Dict[str, float]:
    """
    Fraction of scenes whose planned footprint hits an agent at or before each
    horizon; agents sit at their ground-truth future poses.
    """
    if len(preds) != len(scenes):
        raise ArityError(f"{len(preds)} trajectories for {len(scenes)} scenes")
    if not scenes:
        raise ArityError("no scenes to score")
    first = [first_collision_step(p, s, ego_dims) for p, s in zip(preds, scenes)]
    rates = {h: sum(f is not None and f < k for f in first) / len(scenes) for h, k in HORIZON_STEPS.items()}
    return _with_avg(rates)
