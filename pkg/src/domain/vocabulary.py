"""
Closed vocabularies: meta-actions, traffic lights, navigation, agent classes,
camera views and QA types.
"""
from enum import Enum
from numbers import Integral
from typing import List

from pydantic import BaseModel, ConfigDict

from src.core.exceptions import IndexRangeError, SchemaError

# Planning horizon: T waypoints at DT seconds (3 s)
T_STEPS = 6
DT = 0.5

# 1s / 2s / 3s land on these 1-indexed waypoints
HORIZON_STEPS = {"1s": 2, "2s": 4, "3s": 6}


class Lateral(str, Enum):
    LEFT = "Left"
    STRAIGHT = "Straight"
    RIGHT = "Right"


class Longitudinal(str, Enum):
    ACCELERATE = "Accelerate"
    KEEP = "Keep"
    DECELERATE = "Decelerate"
    STOP = "Stop"


LATERAL_ORDER: List[Lateral] = [Lateral.LEFT, Lateral.STRAIGHT, Lateral.RIGHT]
LONGITUDINAL_ORDER: List[Longitudinal] = [
    Longitudinal.ACCELERATE,
    Longitudinal.KEEP,
    Longitudinal.DECELERATE,
    Longitudinal.STOP,
]
N_LAT = len(LATERAL_ORDER)
N_LON = len(LONGITUDINAL_ORDER)
N_ACT = N_LAT * N_LON


class AgentClass(str, Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    CYCLIST = "cyclist"

    @property
    def is_vru(self) -> bool:
        return self is not AgentClass.VEHICLE


class TrafficLightState(str, Enum):
    RED = "red"
    GREEN = "green"
    YELLOW = "yellow"
    NONE = "none"


# Class order used by the traffic-light classifier heads
TRAFFIC_LIGHT_ORDER: List[TrafficLightState] = [
    TrafficLightState.RED,
    TrafficLightState.GREEN,
    TrafficLightState.YELLOW,
    TrafficLightState.NONE,
]


class NavCommand(str, Enum):
    LEFT = "left"
    STRAIGHT = "straight"
    RIGHT = "right"


NAV_ORDER: List[NavCommand] = [NavCommand.LEFT, NavCommand.STRAIGHT, NavCommand.RIGHT]


class QAType(str, Enum):
    DESCRIPTION = "description"
    TRAFFIC_LIGHT = "traffic_light"
    VRU = "vru"
    MOTION = "motion"
    PLAN = "plan"
    EXPLANATION = "explanation"


QA_ORDER: List[QAType] = [
    QAType.DESCRIPTION,
    QAType.TRAFFIC_LIGHT,
    QAType.VRU,
    QAType.MOTION,
    QAType.PLAN,
    QAType.EXPLANATION,
]


class View(str, Enum):
    FRONT = "FRONT"
    FRONT_LEFT = "FRONT_LEFT"
    FRONT_RIGHT = "FRONT_RIGHT"
    BACK = "BACK"
    BACK_LEFT = "BACK_LEFT"
    BACK_RIGHT = "BACK_RIGHT"

    @property
    def prompt(self) -> str:
        return f"<{self.value.replace('_', ' ')} VIEW>:\n<image>\n"


VIEW_ORDER: List[View] = [
    View.FRONT,
    View.FRONT_LEFT,
    View.FRONT_RIGHT,
    View.BACK,
    View.BACK_LEFT,
    View.BACK_RIGHT,
]
N_VIEWS = len(VIEW_ORDER)

# Sector centres in degrees, CCW positive (y left)
VIEW_CENTER_DEG = {
    View.FRONT: 0.0,
    View.FRONT_LEFT: 60.0,
    View.FRONT_RIGHT: -60.0,
    View.BACK: 180.0,
    View.BACK_LEFT: 120.0,
    View.BACK_RIGHT: -120.0,
}


class MetaAction(BaseModel):
    """A (lateral, longitudinal) driving decision."""

    model_config = ConfigDict(frozen=True)

    lateral: Lateral
    longitudinal: Longitudinal

    @property
    def index(self) -> int:
        return meta_action_index(self)

    def __str__(self) -> str:
        return f"{self.lateral.value}, {self.longitudinal.value}"

    @classmethod
    def parse(cls, text: str) -> "MetaAction":
        """Parse the '<lateral>, <longitudinal>' answer format."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise SchemaError(f"not a meta-action: {text!r}", field="answer")
        try:
            return cls(lateral=Lateral(parts[0]), longitudinal=Longitudinal(parts[1]))
        except ValueError as e:
            raise SchemaError(f"not a meta-action: {text!r}", field="answer") from e


def meta_action_index(action: MetaAction) -> int:
    """Joint index 4 * lateral_rank + longitudinal_rank."""
    return N_LON * LATERAL_ORDER.index(action.lateral) + LONGITUDINAL_ORDER.index(action.longitudinal)


def meta_action_from_index(i: int) -> MetaAction:
    """Inverse of :func:`meta_action_index`."""
    if isinstance(i, bool) or not isinstance(i, Integral) or not 0 <= i < N_ACT:
        raise IndexRangeError(f"meta-action index {i!r} outside [0, {N_ACT})")
    i = int(i)
    return MetaAction(lateral=LATERAL_ORDER[i // N_LON], longitudinal=LONGITUDINAL_ORDER[i % N_LON])


ALL_META_ACTIONS: List[MetaAction] = [meta_action_from_index(i) for i in range(N_ACT)]
