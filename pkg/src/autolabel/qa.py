"""
Planning-oriented QA builders. Every answer is a pure function of the scene record.
"""
from typing import List, Optional

from src.autolabel.rules import DEFAULT_THRESHOLDS, LabelThresholds, derive_meta_action
from src.autolabel.templates import (
    NONE_ANSWER,
    QUESTIONS,
    density_bucket,
    render_action,
    render_description,
    render_explanation,
    render_vru_entry,
)
from src.domain.types import AgentState, QARecord, Scene
from src.domain.vocabulary import MetaAction, QAType

MOTION_RANGE = 30.0
# In-lane obstacle window used by explanations
AHEAD_RANGE = 15.0
LANE_HALF_WIDTH = 2.5


def _record(scene: Scene, qa_type: QAType, answer: str) -> QARecord:
    return QARecord(scene_id=scene.scene_id, qa_type=qa_type, question=QUESTIONS[qa_type], answer=answer)


def _nearest_first(agents: List[AgentState]) -> List[AgentState]:
    return sorted(agents, key=lambda a: (a.distance, a.id))


def nearest_obstacle_ahead(scene: Scene, reach: float = AHEAD_RANGE) -> Optional[AgentState]:
    """Nearest agent in the ego lane ahead within ``reach`` meters."""
    in_lane = [a for a in scene.agents if a.x > 0 and abs(a.y) < LANE_HALF_WIDTH and a.distance <= reach]
    ordered = _nearest_first(in_lane)
    return ordered[0] if ordered else None


def make_traffic_light_qa(scene: Scene) -> QARecord:
    return _record(scene, QAType.TRAFFIC_LIGHT, scene.traffic_light.value)


def make_vru_qa(scene: Scene) -> QARecord:
    vrus = _nearest_first(scene.vrus)
    if not vrus:
        return _record(scene, QAType.VRU, NONE_ANSWER)
    entries = [render_vru_entry(a.agent_class.value, a.x, a.y) for a in vrus]
    return _record(scene, QAType.VRU, "; ".join(entries))


def vehicle_intentions(scene: Scene, th: LabelThresholds = DEFAULT_THRESHOLDS) -> List[tuple]:
    """(agent, action) for every vehicle within the motion range, nearest first."""
    vehicles = _nearest_first([a for a in scene.vehicles if a.distance <= MOTION_RANGE])
    return [(a, derive_meta_action(a.future_in_own_frame(), th)) for a in vehicles]


def make_motion_qa(scene: Scene, th: LabelThresholds = DEFAULT_THRESHOLDS) -> QARecord:
    intentions = vehicle_intentions(scene, th)
    if not intentions:
        return _record(scene, QAType.MOTION, NONE_ANSWER)
    entries = [f"vehicle {agent.id}: {render_action(action)}" for agent, action in intentions]
    return _record(scene, QAType.MOTION, "; ".join(entries))


def ground_truth_action(scene: Scene, th: LabelThresholds = DEFAULT_THRESHOLDS) -> MetaAction:
    return derive_meta_action(scene.ego_future, th)


def make_plan_qa(scene: Scene, th: LabelThresholds = DEFAULT_THRESHOLDS) -> QARecord:
    return _record(scene, QAType.PLAN, render_action(ground_truth_action(scene, th)))


def make_description_qa(scene: Scene) -> QARecord:
    text = render_description(density_bucket(len(scene.agents)), scene.traffic_light, len(scene.vrus))
    return _record(scene, QAType.DESCRIPTION, text)


def make_explanation_qa(scene: Scene, action: MetaAction) -> QARecord:
    obstacle = nearest_obstacle_ahead(scene)
    obstacle_word = obstacle.agent_class.value if obstacle is not None else None
    text = render_explanation(action, scene.traffic_light, scene.nav_command, obstacle_word)
    return _record(scene, QAType.EXPLANATION, text)


def label_scene(scene: Scene, th: LabelThresholds = DEFAULT_THRESHOLDS) -> List[QARecord]:
    """All six QA records for one scene, in the fixed QA order."""
    action = ground_truth_action(scene, th)
    return [
        make_description_qa(scene),
        make_traffic_light_qa(scene),
        make_vru_qa(scene),
        make_motion_qa(scene, th),
        make_plan_qa(scene, th),
        make_explanation_qa(scene, action),
    ]
