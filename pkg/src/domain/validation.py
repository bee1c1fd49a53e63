"""
Scene invariant checks. Violations are returned as data, never raised.
"""
import math
from typing import Iterable, List

from src.domain.types import Scene
from src.domain.vocabulary import T_STEPS


def _finite(values: Iterable[float]) -> bool:
    return all(math.isfinite(v) for v in values)


def _heading_ok(heading: float) -> bool:
    return math.isfinite(heading) and -math.pi < heading <= math.pi


def _check_waypoints(name: str, points, violations: List[str]) -> None:
    if len(points) != T_STEPS:
        violations.append(f"{name}: waypoint count {len(points)} != {T_STEPS}")
    if not _finite(v for p in points for v in p):
        violations.append(f"{name}: non-finite waypoint")


def validate_scene(scene: Scene) -> List[str]:
    """Return one description per violated invariant; empty when valid."""
    violations: List[str] = []

    ego = scene.ego
    if not _finite((ego.x, ego.y, ego.heading, ego.speed)):
        violations.append("ego: non-finite state")
    elif ego.x != 0.0 or ego.y != 0.0 or ego.heading != 0.0:
        violations.append("ego: must sit at the origin with heading 0")
    if ego.speed < 0:
        violations.append("ego: speed must be >= 0")

    seen = set()
    for agent in scene.agents:
        name = f"agent {agent.id}"
        if agent.id in seen:
            violations.append(f"{name}: duplicate id")
        seen.add(agent.id)
        if not _finite((agent.x, agent.y, agent.speed, agent.length, agent.width)):
            violations.append(f"{name}: non-finite state")
        if not agent.length > 0:
            violations.append(f"{name}: length must be > 0")
        if not agent.width > 0:
            violations.append(f"{name}: width must be > 0")
        if agent.speed < 0:
            violations.append(f"{name}: speed must be >= 0")
        if not _heading_ok(agent.heading):
            violations.append(f"{name}: heading outside (-pi, pi]")
        _check_waypoints(f"{name} future", agent.future, violations)

    if scene.ego_future is not None:
        _check_waypoints("ego_future", scene.ego_future.waypoints, violations)

    return violations
