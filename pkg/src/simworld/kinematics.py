"""
Unicycle rollout with constant curvature and a linear speed ramp.
"""
import math
from typing import Protocol

from src.domain.types import Trajectory
from src.domain.vocabulary import DT, T_STEPS
from src.simworld.config import ManeuverScript


class Pose(Protocol):
    x: float
    y: float
    heading: float


def speed_profile(script: ManeuverScript, steps: int = T_STEPS):
    """Speeds at t = DT, 2 DT, ... ramping toward the target, clamped at 0."""
    delta = script.target_speed - script.initial_speed
    speeds = []
    for k in range(1, steps + 1):
        frac = min(1.0, k * DT / script.ramp_time)
        speeds.append(max(0.0, script.initial_speed + delta * frac))
    return speeds


def rollout_kinematics(start: Pose, script: ManeuverScript) -> Trajectory:
    """
    Integrate the script from ``start``.

    heading_{k+1} = heading_k + v_k * curvature * DT, then the position
    advances v_k * DT along the new heading.
    """
    x, y, heading = float(start.x), float(start.y), float(start.heading)
    waypoints = []
    for v in speed_profile(script):
        heading += v * script.curvature * DT
        x += v * math.cos(heading) * DT
        y += v * math.sin(heading) * DT
        waypoints.append((x, y))
    return Trajectory(waypoints=tuple(waypoints))
