"""
Domain records shared by every package.

All records are frozen pydantic models. Floats are quantised to six decimal
places on construction so that the JSONL codec round-trips exactly.
"""
import math
from typing import Annotated, List, Optional, Tuple

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator

from src.domain.vocabulary import (
    DT,
    AgentClass,
    NavCommand,
    QAType,
    TrafficLightState,
)

# Largest six-decimal value inside (-pi, pi]
_HEADING_LIMIT = 3.141592


def quantize(value: float) -> float:
    """Round a finite float to six decimals; non-finite values pass through."""
    value = float(value)
    if not math.isfinite(value):
        return value
    return round(value, 6)


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi] and quantise without leaving that interval."""
    wrapped = math.atan2(math.sin(angle), math.cos(angle))
    if wrapped <= -math.pi:
        wrapped = math.pi
    return min(max(quantize(wrapped), -_HEADING_LIMIT), _HEADING_LIMIT)


Coord = Annotated[float, AfterValidator(quantize)]
Point = Tuple[Coord, Coord]


class _Record(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)


class EgoState(_Record):
    x: Coord = 0.0
    y: Coord = 0.0
    heading: Coord = 0.0
    speed: Coord = 0.0


class Trajectory(_Record):
    """T ego-frame waypoints sampled every DT seconds."""

    waypoints: Tuple[Point, ...]

    @model_validator(mode="before")
    @classmethod
    def _accept_bare_list(cls, data):
        if isinstance(data, (list, tuple)):
            return {"waypoints": data}
        return data

    @property
    def speeds(self) -> Tuple[float, ...]:
        """Per-step speeds; the first step is measured from the origin."""
        out = []
        px, py = 0.0, 0.0
        for x, y in self.waypoints:
            out.append(math.hypot(x - px, y - py) / DT)
            px, py = x, y
        return tuple(out)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.waypoints, dtype=np.float64).reshape(len(self.waypoints), 2)

    @classmethod
    def from_array(cls, array) -> "Trajectory":
        arr = np.asarray(array, dtype=np.float64).reshape(-1, 2)
        return cls(waypoints=tuple((float(x), float(y)) for x, y in arr))

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for p in self.waypoints for v in p)


class AgentState(_Record):
    id: int
    agent_class: AgentClass = Field(alias="class")
    x: Coord
    y: Coord
    heading: Coord
    speed: Coord
    length: Coord
    width: Coord
    future: Tuple[Point, ...]

    @property
    def distance(self) -> float:
        return math.hypot(self.x, self.y)

    def future_in_own_frame(self) -> Trajectory:
        """Future waypoints expressed with this agent at the origin, heading 0."""
        c, s = math.cos(self.heading), math.sin(self.heading)
        local = []
        for fx, fy in self.future:
            dx, dy = fx - self.x, fy - self.y
            local.append((c * dx + s * dy, -s * dx + c * dy))
        return Trajectory(waypoints=tuple(local))


class Scene(_Record):
    """One timestamped driving snapshot in the ego frame."""

    scene_id: str
    ego: EgoState
    agents: Tuple[AgentState, ...]
    traffic_light: TrafficLightState
    nav_command: NavCommand
    ego_future: Optional[Trajectory]

    def without_future(self) -> "Scene":
        """Copy with the ground-truth ego future erased."""
        return self.model_copy(update={"ego_future": None})

    @property
    def vrus(self) -> List[AgentState]:
        return [a for a in self.agents if a.agent_class.is_vru]

    @property
    def vehicles(self) -> List[AgentState]:
        return [a for a in self.agents if a.agent_class is AgentClass.VEHICLE]


class QARecord(_Record):
    scene_id: str
    qa_type: QAType
    question: str
    answer: str = Field(min_length=1)
