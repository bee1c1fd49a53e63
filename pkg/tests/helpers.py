"""
Builders for hand-made scenes used across the test modules.
"""
from typing import Optional, Sequence, Tuple

from src.domain.types import AgentState, EgoState, Scene, Trajectory
from src.domain.vocabulary import T_STEPS, AgentClass, NavCommand, TrafficLightState


def make_agent(
    agent_id: int,
    agent_class: AgentClass = AgentClass.VEHICLE,
    x: float = 10.0,
    y: float = 0.0,
    heading: float = 0.0,
    speed: float = 0.0,
    length: float = 4.5,
    width: float = 1.8,
    future: Optional[Sequence[Tuple[float, float]]] = None,
) -> AgentState:
    if future is None:
        future = [(x, y)] * T_STEPS
    return AgentState(
        id=agent_id,
        agent_class=agent_class,
        x=x,
        y=y,
        heading=heading,
        speed=speed,
        length=length,
        width=width,
        future=tuple(future),
    )


def straight_future(speed: float = 10.0) -> Trajectory:
    return Trajectory(waypoints=tuple((speed * 0.5 * k, 0.0) for k in range(1, T_STEPS + 1)))


def make_scene(
    scene_id: str = "scene-000000",
    agents: Sequence[AgentState] = (),
    light: TrafficLightState = TrafficLightState.NONE,
    nav: NavCommand = NavCommand.STRAIGHT,
    ego_speed: float = 10.0,
    ego_future: Optional[Trajectory] = None,
) -> Scene:
    return Scene(
        scene_id=scene_id,
        ego=EgoState(speed=ego_speed),
        agents=tuple(agents),
        traffic_light=light,
        nav_command=nav,
        ego_future=ego_future if ego_future is not None else straight_future(ego_speed),
    )
