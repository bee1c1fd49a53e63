"""
Deterministic synthetic scene generator.

Each scene draws its randomness from its own (seed, index) stream, so scenes
can be produced in any order or in parallel with identical results.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from src.autolabel.rules import DEFAULT_THRESHOLDS, derive_meta_action
from src.core.logging_config import app_logger
from src.domain.codec import write_records
from src.domain.geometry import EGO_LENGTH, EGO_WIDTH, box_corners, polygons_overlap
from src.domain.types import AgentState, EgoState, Scene, Trajectory, quantize, wrap_angle
from src.domain.vocabulary import (
    ALL_META_ACTIONS,
    AgentClass,
    Lateral,
    Longitudinal,
    MetaAction,
    NavCommand,
    TrafficLightState,
)
from src.simworld.config import MANEUVERS, ManeuverScript, SimConfig
from src.simworld.kinematics import rollout_kinematics

SENSING_RANGE = 50.0
MAX_SCRIPT_TRIES = 50
MAX_PLACEMENT_TRIES = 30

_ORIGIN = EgoState()
_TURN_LONGITUDINAL = ("keep", "accelerate", "decelerate", "stop")

# Agent footprints (length range, width range)
_DIMENSIONS = {
    AgentClass.VEHICLE: ((4.0, 5.0), (1.8, 2.0)),
    AgentClass.PEDESTRIAN: ((0.5, 0.7), (0.5, 0.7)),
    AgentClass.CYCLIST: ((1.6, 1.9), (0.6, 0.8)),
}


def scene_rng(seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one scene."""
    return np.random.default_rng([seed, index])


def scene_id_for(index: int) -> str:
    return f"{index:06d}"


def _intent(name: str, rng: np.random.Generator) -> Tuple[Lateral, str]:
    """(lateral decision, longitudinal profile) intended by a maneuver."""
    if name == "turn_left":
        return Lateral.LEFT, _TURN_LONGITUDINAL[rng.integers(len(_TURN_LONGITUDINAL))]
    if name == "turn_right":
        return Lateral.RIGHT, _TURN_LONGITUDINAL[rng.integers(len(_TURN_LONGITUDINAL))]
    profile = {
        "cruise": "keep",
        "accelerate": "accelerate",
        "decelerate": "decelerate",
        "brake_to_stop": "stop",
        "stop_at_light": "stop",
    }[name]
    return Lateral.STRAIGHT, profile


def _speeds_for(profile: str, rng: np.random.Generator) -> Tuple[float, float, float]:
    """(initial speed, target speed, ramp time) for a longitudinal profile."""
    if profile == "keep":
        v = rng.uniform(4.0, 12.0)
        return v, v, 3.0
    if profile == "accelerate":
        v = rng.uniform(2.0, 8.0)
        return v, v + rng.uniform(2.5, 5.0), 3.0
    if profile == "decelerate":
        v = rng.uniform(8.0, 13.0)
        return v, max(2.0, v - rng.uniform(2.5, 5.0)), 3.0
    v = rng.uniform(8.0, 12.0)
    return v, 0.0, rng.uniform(2.0, 3.0)


def _turn_curvature(name: str, v0: float, target: float, ramp: float, offset: float) -> Optional[float]:
    """Curvature whose rollout ends ``offset`` meters to the side (bisection)."""
    sign = 1.0 if name == "turn_left" else -1.0
    lo, hi = 0.0, 0.3

    def final_offset(kappa: float) -> float:
        script = ManeuverScript(
            name=name, curvature=sign * kappa, target_speed=target, initial_speed=v0, ramp_time=ramp
        )
        return abs(rollout_kinematics(_ORIGIN, script).waypoints[-1][1])

    if final_offset(hi) < offset:
        return None
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if final_offset(mid) < offset:
            lo = mid
        else:
            hi = mid
    return sign * hi


def sample_ego_script(name: str, rng: np.random.Generator) -> Tuple[ManeuverScript, MetaAction]:
    """Sample a script for ``name`` whose labelled action is its intended one."""
    lateral, profile = _intent(name, rng)
    script = None
    for _ in range(MAX_SCRIPT_TRIES):
        v0, target, ramp = _speeds_for(profile, rng)
        curvature = 0.0
        if lateral is not Lateral.STRAIGHT:
            curvature = _turn_curvature(name, v0, target, ramp, rng.uniform(3.5, 8.0))
            if curvature is None:
                continue
        script = ManeuverScript(
            name=name, curvature=curvature, target_speed=target, initial_speed=v0, ramp_time=ramp
        )
        longitudinal = {
            "keep": Longitudinal.KEEP,
            "accelerate": Longitudinal.ACCELERATE,
            "decelerate": Longitudinal.DECELERATE,
            "stop": Longitudinal.STOP,
        }[profile]
        intended = MetaAction(lateral=lateral, longitudinal=longitudinal)
        if derive_meta_action(rollout_kinematics(_ORIGIN, script), DEFAULT_THRESHOLDS) == intended:
            return script, intended
    if script is None:
        app_logger.warning(f"No reachable curvature for {name}; falling back to cruise")
        v = rng.uniform(4.0, 12.0)
        script = ManeuverScript(name="cruise", target_speed=v, initial_speed=v)
    else:
        app_logger.warning(f"No script for {name} matched its intended action; keeping last sample")
    return script, derive_meta_action(rollout_kinematics(_ORIGIN, script), DEFAULT_THRESHOLDS)


def _agent_box(agent: AgentState) -> np.ndarray:
    return box_corners(agent.x, agent.y, agent.heading, agent.length, agent.width)


def _fits(candidate: AgentState, placed: List[AgentState]) -> bool:
    corners = _agent_box(candidate)
    if polygons_overlap(corners, box_corners(0.0, 0.0, 0.0, EGO_LENGTH, EGO_WIDTH)):
        return False
    return not any(polygons_overlap(corners, _agent_box(other)) for other in placed)


def _make_agent(
    agent_id: int,
    agent_class: AgentClass,
    x: float,
    y: float,
    heading: float,
    script: ManeuverScript,
    rng: np.random.Generator,
) -> AgentState:
    (l_lo, l_hi), (w_lo, w_hi) = _DIMENSIONS[agent_class]
    heading = wrap_angle(heading)
    x, y = quantize(x), quantize(y)
    start = EgoState(x=x, y=y, heading=heading)
    future = rollout_kinematics(start, script)
    return AgentState(
        id=agent_id,
        agent_class=agent_class,
        x=x,
        y=y,
        heading=heading,
        speed=script.initial_speed,
        length=rng.uniform(l_lo, l_hi),
        width=rng.uniform(w_lo, w_hi),
        future=future.waypoints,
    )


def _steady(speed: float) -> ManeuverScript:
    return ManeuverScript(name="cruise", target_speed=speed, initial_speed=speed)


def _random_agent_script(agent_class: AgentClass, rng: np.random.Generator) -> ManeuverScript:
    if agent_class is AgentClass.PEDESTRIAN:
        return _steady(rng.uniform(0.0, 1.5))
    if agent_class is AgentClass.CYCLIST:
        return _steady(rng.uniform(2.0, 6.0))
    name = ("cruise", "accelerate", "decelerate", "brake_to_stop", "turn_left", "turn_right")[rng.integers(6)]
    v = rng.uniform(2.0, 12.0)
    if name == "accelerate":
        return ManeuverScript(name=name, target_speed=v + 3.0, initial_speed=v)
    if name == "decelerate":
        return ManeuverScript(name=name, target_speed=max(0.0, v - 4.0), initial_speed=v)
    if name == "brake_to_stop":
        return ManeuverScript(name=name, target_speed=0.0, initial_speed=v, ramp_time=2.5)
    if name == "turn_left":
        return ManeuverScript(name=name, curvature=0.08, target_speed=v, initial_speed=v)
    if name == "turn_right":
        return ManeuverScript(name=name, curvature=-0.08, target_speed=v, initial_speed=v)
    return _steady(v)


def lateral_is_turn(name: str) -> bool:
    return name in ("turn_left", "turn_right")


def _in_ego_lane_ahead(x: float, y: float) -> bool:
    return x > 0 and abs(y) < 3.0 and x < SENSING_RANGE


def _cue_agent(
    profile: str, script: ManeuverScript, ego_future: Trajectory, rng: np.random.Generator
) -> Optional[Tuple[AgentClass, float, float, ManeuverScript]]:
    """In-lane lead agent that explains the ego's longitudinal intent."""
    if profile == "keep":
        return AgentClass.VEHICLE, rng.uniform(30.0, 45.0), rng.uniform(-0.3, 0.3), _steady(script.initial_speed)
    if profile == "decelerate":
        return AgentClass.VEHICLE, rng.uniform(15.0, 28.0), rng.uniform(-0.3, 0.3), _steady(script.target_speed)
    if profile == "stop":
        ego_end = max(p[0] for p in ego_future.waypoints)
        gap = EGO_LENGTH / 2 + 2.5 + rng.uniform(2.0, 5.0)
        agent_class = AgentClass.VEHICLE if rng.random() < 0.7 else AgentClass.PEDESTRIAN
        return agent_class, ego_end + gap, rng.uniform(-0.3, 0.3), _steady(0.0)
    return None


def generate_scene(rng: np.random.Generator, config: SimConfig, index: int) -> Scene:
    """
    Generate one scene.

    Args:
        rng: Random stream for this scene (see scene_rng)
        config: Simulator configuration
        index: Scene index, used for the scene id

    Returns:
        A Scene whose ego future realises the sampled maneuver
    """
    names = list(config.maneuver_mix)
    weights = np.array([config.maneuver_mix[n] for n in names], dtype=np.float64)
    name = names[rng.choice(len(names), p=weights / weights.sum())]
    script, action = sample_ego_script(name, rng)
    ego_future = rollout_kinematics(_ORIGIN, script)
    profile = action.longitudinal

    # Traffic light consistent with the longitudinal intent
    light = TrafficLightState.NONE
    has_light = rng.random() < config.traffic_light_prob
    if name == "stop_at_light" or (profile is Longitudinal.STOP and lateral_is_turn(name)):
        light = TrafficLightState.RED
    elif profile is Longitudinal.ACCELERATE and has_light:
        light = TrafficLightState.GREEN
    elif profile is Longitudinal.DECELERATE and has_light:
        light = TrafficLightState.YELLOW

    n_agents = int(rng.integers(0, config.max_agents + 1))
    agents: List[AgentState] = []

    profile_key = profile.value.lower()
    needs_cue = config.max_agents > 0 and light is TrafficLightState.NONE and name != "stop_at_light"
    if needs_cue:
        cue = _cue_agent(profile_key, script, ego_future, rng)
        if cue is not None:
            agent_class, x, y, cue_script = cue
            lead = _make_agent(1, agent_class, x, y, 0.0, cue_script, rng)
            if _fits(lead, agents):
                agents.append(lead)
                n_agents = max(n_agents, 1)

    attempts = 0
    while len(agents) < n_agents and attempts < MAX_PLACEMENT_TRIES * max(1, n_agents):
        attempts += 1
        if rng.random() < config.vru_fraction:
            agent_class = AgentClass.PEDESTRIAN if rng.random() < 0.5 else AgentClass.CYCLIST
        else:
            agent_class = AgentClass.VEHICLE
        r = rng.uniform(5.0, 48.0)
        bearing = rng.uniform(-math.pi, math.pi)
        x, y = r * math.cos(bearing), r * math.sin(bearing)
        if _in_ego_lane_ahead(x, y):
            continue
        if agent_class is AgentClass.PEDESTRIAN:
            heading = rng.uniform(-math.pi, math.pi)
        else:
            heading = (0.0, math.pi, math.pi / 2, -math.pi / 2)[rng.integers(4)] + rng.normal(0.0, 0.05)
        candidate = _make_agent(len(agents) + 1, agent_class, x, y, heading, _random_agent_script(agent_class, rng), rng)
        if _fits(candidate, agents):
            agents.append(candidate)

    if name == "turn_left":
        nav = NavCommand.LEFT
    elif name == "turn_right":
        nav = NavCommand.RIGHT
    else:
        nav = NavCommand.STRAIGHT

    return Scene(
        scene_id=scene_id_for(index),
        ego=EgoState(speed=script.initial_speed),
        agents=tuple(agents),
        traffic_light=light,
        nav_command=nav,
        ego_future=ego_future,
    )


def _generate_one(config: SimConfig, index: int) -> Scene:
    return generate_scene(scene_rng(config.seed, index), config, index)


def generate_scenes(config: SimConfig, jobs: int = 1) -> List[Scene]:
    """All scenes of a dataset, in scene_id order."""
    indices = range(config.n_scenes)
    if jobs > 1 and config.n_scenes > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scenes = list(pool.map(partial(_generate_one, config), indices, chunksize=64))
    else:
        scenes = [_generate_one(config, i) for i in indices]
    return sorted(scenes, key=lambda s: s.scene_id)


def action_histogram(scenes: List[Scene]) -> Dict[str, int]:
    histogram = {str(a): 0 for a in ALL_META_ACTIONS}
    for scene in scenes:
        histogram[str(derive_meta_action(scene.ego_future, DEFAULT_THRESHOLDS))] += 1
    return histogram


def generate_dataset(config: SimConfig, out_path: Union[str, Path], jobs: int = 1) -> Dict:
    """
    Generate and write a scene dataset.

    Returns:
        Summary with the scene count and the labelled action histogram
    """
    app_logger.info(f"Generating {config.n_scenes} scenes (seed={config.seed})")
    scenes = generate_scenes(config, jobs)
    write_records(out_path, scenes)
    summary = {"count": len(scenes), "action_histogram": action_histogram(scenes)}
    app_logger.info(f"✅ Wrote {len(scenes)} scenes to {out_path}")
    return summary


__all__ = ["MANEUVERS", "generate_dataset", "generate_scene", "generate_scenes", "scene_rng"]
