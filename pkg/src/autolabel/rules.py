"""
Meta-action labelling rule: ground-truth future trajectory -> MetaAction.
"""
from pydantic import model_validator

from src.core.config import ConfigModel
from src.domain.types import Trajectory
from src.domain.vocabulary import Lateral, Longitudinal, MetaAction


class LabelThresholds(ConfigModel):
    """Thresholds for the lateral and longitudinal decisions."""

    tau_lat: float = 2.0
    dv_acc: float = 1.0
    dv_dec: float = -1.0
    v_stop: float = 0.5

    @model_validator(mode="after")
    def _check(self):
        if not self.tau_lat > 0:
            raise ValueError("tau_lat must be > 0")
        if not self.dv_acc > 0 > self.dv_dec:
            raise ValueError("need dv_acc > 0 > dv_dec")
        if not self.v_stop > 0:
            raise ValueError("v_stop must be > 0")
        return self


DEFAULT_THRESHOLDS = LabelThresholds()


def lateral_decision(final_offset: float, th: LabelThresholds) -> Lateral:
    if final_offset > th.tau_lat:
        return Lateral.LEFT
    if final_offset < -th.tau_lat:
        return Lateral.RIGHT
    return Lateral.STRAIGHT


def longitudinal_decision(v0: float, v_end: float, th: LabelThresholds) -> Longitudinal:
    # Stop dominates: a hard brake that ends below v_stop is a stop
    if v_end < th.v_stop:
        return Longitudinal.STOP
    dv = v_end - v0
    if dv >= th.dv_acc:
        return Longitudinal.ACCELERATE
    if dv <= th.dv_dec:
        return Longitudinal.DECELERATE
    return Longitudinal.KEEP


def derive_meta_action(traj: Trajectory, th: LabelThresholds = DEFAULT_THRESHOLDS) -> MetaAction:
    """
    Label a trajectory.

    Lateral uses the offset at the final waypoint; longitudinal compares the
    final step speed with v0 estimated from the first waypoint displacement.
    """
    speeds = traj.speeds
    return MetaAction(
        lateral=lateral_decision(traj.waypoints[-1][1], th),
        longitudinal=longitudinal_decision(speeds[0], speeds[-1], th),
    )
