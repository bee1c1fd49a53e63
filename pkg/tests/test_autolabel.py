"""
Tests for the meta-action rule, QA templates and the dataset labeller.
"""
import numpy as np
import pytest

from src.autolabel.pipeline import label_dataset
from src.autolabel.qa import label_scene, make_motion_qa, make_vru_qa
from src.autolabel.rules import LabelThresholds, derive_meta_action
from src.autolabel.templates import (
    QUESTIONS,
    count_listed,
    first_motion_action,
    parse_description,
    render_description,
)
from src.core.exceptions import ConfigError
from src.domain.codec import read_qas, write_records
from src.domain.types import EgoState, Trajectory
from src.domain.vocabulary import (
    QA_ORDER,
    AgentClass,
    Lateral,
    Longitudinal,
    MetaAction,
    QAType,
    TrafficLightState,
)
from src.simworld.config import ManeuverScript
from src.simworld.kinematics import rollout_kinematics
from tests.helpers import make_agent, make_scene

STOPPED = Trajectory(waypoints=((0.0, 0.0),) * 6)


def _answers(scene):
    return {qa.qa_type: qa.answer for qa in label_scene(scene)}


def test_drifting_left_at_steady_speed():
    traj = Trajectory(waypoints=tuple((2.0 * k, 0.5 * k) for k in range(1, 7)))
    assert derive_meta_action(traj) == MetaAction(lateral=Lateral.LEFT, longitudinal=Longitudinal.KEEP)


def test_braking_to_a_halt_is_a_stop():
    script = ManeuverScript(name="brake_to_stop", initial_speed=6.0, target_speed=0.0, ramp_time=2.0)
    traj = rollout_kinematics(EgoState(), script)
    assert derive_meta_action(traj) == MetaAction(lateral=Lateral.STRAIGHT, longitudinal=Longitudinal.STOP)


def _oracle(waypoints, th):
    pts = np.vstack([[0.0, 0.0], np.asarray(waypoints)])
    speeds = np.linalg.norm(np.diff(pts, axis=0), axis=1) / 0.5
    y = waypoints[-1][1]
    lat = "Left" if y > th.tau_lat else "Right" if y < -th.tau_lat else "Straight"
    if speeds[-1] < th.v_stop:
        lon = "Stop"
    elif speeds[-1] - speeds[0] >= th.dv_acc:
        lon = "Accelerate"
    elif speeds[-1] - speeds[0] <= th.dv_dec:
        lon = "Decelerate"
    else:
        lon = "Keep"
    return f"{lat}, {lon}"


def test_rule_agrees_with_brute_force_oracle():
    rng = np.random.default_rng(0)
    th = LabelThresholds()
    for _ in range(10_000):
        steps = rng.uniform([-1.0, -2.0], [8.0, 2.0], size=(6, 2))
        points = np.cumsum(steps, axis=0)
        traj = Trajectory.from_array(points)
        assert str(derive_meta_action(traj, th)) == _oracle(traj.waypoints, th)


def test_thresholds_are_validated():
    with pytest.raises(ConfigError):
        LabelThresholds(tau_lat=0.0)
    with pytest.raises(ConfigError):
        LabelThresholds(dv_acc=-1.0)


def test_traffic_light_answers():
    assert _answers(make_scene(light=TrafficLightState.RED))[QAType.TRAFFIC_LIGHT] == "red"
    assert _answers(make_scene())[QAType.TRAFFIC_LIGHT] == "none"


def test_vru_answer_lists_position():
    scene = make_scene(agents=[make_agent(4, AgentClass.PEDESTRIAN, x=3.7, y=-12.2)])
    assert make_vru_qa(scene).answer == "pedestrian 3 m ahead and 12 m right"


def test_equidistant_vrus_are_ordered_by_id():
    scene = make_scene(
        agents=[
            make_agent(7, AgentClass.CYCLIST, x=0.0, y=10.0),
            make_agent(2, AgentClass.PEDESTRIAN, x=0.0, y=-10.0),
        ]
    )
    answer = make_vru_qa(scene).answer
    assert answer == "pedestrian 0 m ahead and 10 m right; cyclist 0 m ahead and 10 m left"
    assert count_listed(answer) == 2


def test_vru_answer_none_without_vrus():
    assert make_vru_qa(make_scene(agents=[make_agent(1)])).answer == "none"
    assert count_listed("none") == 0


def test_motion_answer_for_parked_vehicle():
    answer = make_motion_qa(make_scene(agents=[make_agent(1, x=10.0, y=0.0)])).answer
    assert answer == "vehicle 1: Straight, Stop"
    assert first_motion_action(answer) == MetaAction(lateral=Lateral.STRAIGHT, longitudinal=Longitudinal.STOP)


def test_motion_ignores_distant_vehicles():
    assert make_motion_qa(make_scene(agents=[make_agent(1, x=40.0, y=0.0)])).answer == "none"
    assert first_motion_action("none") is None


def test_empty_scene_description():
    assert _answers(make_scene())[QAType.DESCRIPTION] == (
        "The road is empty. There is no traffic light. "
        "No vulnerable road users are nearby. The scene is a paved urban road."
    )


def test_busy_scene_description():
    agents = [make_agent(i, x=8.0 * i, y=6.0) for i in range(1, 6)]
    description = _answers(make_scene(agents=agents))[QAType.DESCRIPTION]
    assert description.startswith("Traffic is busy.")
    assert parse_description(description) == (2, TrafficLightState.NONE)


def test_description_variants_parse_to_same_facts():
    for variant in range(3):
        text = render_description(1, TrafficLightState.YELLOW, 2, variant)
        assert text
    assert parse_description(render_description(1, TrafficLightState.YELLOW, 2)) == (1, TrafficLightState.YELLOW)


def test_explanations_mention_their_cause():
    red_stop = _answers(make_scene(light=TrafficLightState.RED, ego_speed=0.0, ego_future=STOPPED))
    assert red_stop[QAType.PLAN] == "Straight, Stop"
    assert "red" in red_stop[QAType.EXPLANATION]
    cruise = _answers(make_scene())
    assert cruise[QAType.PLAN] == "Straight, Keep"
    assert "navigation" in cruise[QAType.EXPLANATION]


def test_label_scene_uses_fixed_order_and_questions():
    records = label_scene(make_scene())
    assert [r.qa_type for r in records] == QA_ORDER
    assert all(r.question == QUESTIONS[r.qa_type] for r in records)


def test_label_dataset_writes_six_records_per_scene(tmp_path, small_scenes):
    scenes_path = tmp_path / "scenes.jsonl"
    write_records(scenes_path, small_scenes)
    first, second = tmp_path / "qa1.jsonl", tmp_path / "qa2.jsonl"

    summary = label_dataset(scenes_path, first)
    label_dataset(scenes_path, second)

    assert summary["records"] == 6 * len(small_scenes)
    assert set(summary["records_per_type"].values()) == {len(small_scenes)}
    assert len(read_qas(first)) == 6 * len(small_scenes)
    assert first.read_bytes() == second.read_bytes()
