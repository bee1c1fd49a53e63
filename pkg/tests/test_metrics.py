"""
Tests for decision, caption and trajectory metrics and the evaluation report.
"""
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from src.autolabel.qa import ground_truth_action, make_description_qa
from src.core.exceptions import ArityError, ConfigError
from src.domain.geometry import box_corners, polygons_overlap, separation_margin
from src.domain.types import Trajectory
from src.domain.vocabulary import Lateral, Longitudinal, MetaAction
from src.metrics.captions import align, bleu4, cider, cider_scores, meteor_lite, meteor_lite_multi, tokenize
from src.metrics.decision import accuracy, axis_accuracy, f1_table, joint_accuracy, per_class_f1
from src.metrics.report import (
    EvalConfig,
    MetricsReport,
    evaluate,
    plan_actions,
    read_report,
    reference_descriptions,
    score,
    write_report,
)
from src.metrics.trajectory import collision_rate, first_collision_step, l2_horizons, mean_l2
from src.planner.params import init_checkpoint
from tests.helpers import make_agent, make_scene, straight_future

CAPTION_PAIRS = json.loads((Path(__file__).parent / "fixtures" / "caption_pairs.json").read_text(encoding="utf-8"))


def _a(lat: str, lon: str) -> MetaAction:
    return MetaAction(lateral=Lateral(lat), longitudinal=Longitudinal(lon))


def _shifted(offsets) -> Trajectory:
    base = straight_future().waypoints
    return Trajectory(waypoints=tuple((x, y + dy) for (x, y), dy in zip(base, offsets)))


# Decision metrics


def test_joint_accuracy_example():
    preds = [_a("Left", "Keep"), _a("Straight", "Keep"), _a("Right", "Stop")]
    gts = [_a("Left", "Keep"), _a("Straight", "Keep"), _a("Right", "Keep")]
    assert joint_accuracy(preds, gts) == pytest.approx(0.6667, abs=1e-4)
    assert axis_accuracy(preds, gts, "lateral") == 1.0
    assert accuracy(preds, gts, "per_axis") == pytest.approx((1.0 + 2 / 3) / 2)


def test_lateral_f1_example():
    preds = [_a("Left", "Keep"), _a("Left", "Keep"), _a("Straight", "Keep")]
    gts = [_a("Left", "Keep"), _a("Straight", "Keep"), _a("Straight", "Keep")]
    assert per_class_f1(preds, gts, Lateral.LEFT, "lateral") == pytest.approx(0.6667, abs=1e-4)
    assert per_class_f1(preds, gts, Lateral.RIGHT, "lateral") == 1.0
    table = f1_table(preds, gts, "longitudinal")
    assert list(table) == ["accelerate", "keep", "decelerate", "stop"]
    assert table["keep"] == 1.0


def test_missed_class_scores_zero():
    preds = [_a("Straight", "Keep")]
    gts = [_a("Left", "Keep")]
    assert per_class_f1(preds, gts, Lateral.LEFT, "lateral") == 0.0


def test_decision_metrics_need_matching_lengths():
    with pytest.raises(ArityError):
        joint_accuracy([_a("Left", "Keep")], [])
    with pytest.raises(ArityError):
        joint_accuracy([], [])


def test_joint_never_exceeds_marginals():
    rng = np.random.default_rng(0)
    lats, lons = ["Left", "Straight", "Right"], ["Accelerate", "Keep", "Decelerate", "Stop"]
    for _ in range(50):
        n = int(rng.integers(1, 20))
        preds = [_a(lats[rng.integers(3)], lons[rng.integers(4)]) for _ in range(n)]
        gts = [_a(lats[rng.integers(3)], lons[rng.integers(4)]) for _ in range(n)]
        joint = joint_accuracy(preds, gts)
        assert joint <= axis_accuracy(preds, gts, "lateral")
        assert joint <= axis_accuracy(preds, gts, "longitudinal")


# Caption metrics


def test_tokenize_strips_punctuation():
    assert tokenize("The light, ahead is RED.") == ["the", "light", "ahead", "is", "red"]


def test_bleu_identity_and_disjoint():
    text = "the traffic light ahead is red"
    assert bleu4(text, [text]) == pytest.approx(1.0)
    assert bleu4("alpha beta gamma delta", [text]) <= 1e-2
    assert bleu4("", [text]) == 0.0


def test_bleu_hand_computed():
    expected = math.exp(1 - 5 / 3) * math.exp((math.log(1.0) + math.log(0.5) + 2 * math.log(1e-9)) / 4)
    assert bleu4("the car stops", ["the red car stops now"]) == pytest.approx(expected, rel=1e-9)


def test_bleu_uses_closest_reference_length():
    long_ref = "the car stops at the red light now"
    assert bleu4("the car stops now", ["the car stops now", long_ref]) == pytest.approx(1.0)


CORPUS = [
    "the road is empty and the light is green",
    "traffic is busy with two cyclists nearby",
    "a pedestrian waits on the left side of the road",
]


def test_cider_identity_is_ten():
    scores = cider_scores(CORPUS, [[c] for c in CORPUS])
    assert scores == pytest.approx([10.0] * 3)
    assert cider(CORPUS, [[c] for c in CORPUS]) == pytest.approx(10.0)


def test_cider_disjoint_is_zero():
    candidates = ["zebra xylophone quartz", "lorem ipsum dolor", "foo bar baz qux"]
    assert cider(candidates, [[c] for c in CORPUS]) == 0.0


def test_cider_needs_references():
    with pytest.raises(ConfigError):
        cider([], [])
    with pytest.raises(ArityError):
        cider(["one"], [])


def test_meteor_identity_has_one_chunk():
    text = "the traffic light ahead is red"
    assert meteor_lite(text, text) == pytest.approx(1 - 0.5 / 216)


def test_meteor_single_word_and_no_match():
    assert meteor_lite("car", "car") == pytest.approx(0.5)
    assert meteor_lite("car", "truck") == 0.0
    assert meteor_lite_multi("car", ["truck", "car"]) == pytest.approx(0.5)


def test_alignment_prefers_fewest_chunks():
    assert align(["a", "b", "a", "b"], ["a", "b"]) == (2, 1)
    assert align(["b", "a"], ["a", "b"]) == (2, 2)
    assert align(["a", "b"], ["a", "x", "a", "b"]) == (2, 1)


def test_alignment_scales_to_long_repetitive_captions():
    words = ["the", "car", "stops", "and", "the", "car", "waits"] * 4 + ["the", "car"]
    assert len(words) == 30
    start = time.perf_counter()
    assert align(words, words) == (30, 1)
    assert align(words, list(reversed(words)))[0] == 30
    score = meteor_lite(" ".join(words), " ".join(reversed(words)))
    assert time.perf_counter() - start < 1.0
    assert 0.0 < score < 1.0


@pytest.mark.parametrize("pair", CAPTION_PAIRS["pairs"], ids=lambda p: p["candidate"][:24])
def test_caption_metrics_match_hand_computed_fixture(pair):
    assert bleu4(pair["candidate"], [pair["reference"]]) == pytest.approx(pair["bleu4"], abs=1e-6)
    assert meteor_lite(pair["candidate"], pair["reference"]) == pytest.approx(pair["meteor_lite"], abs=1e-6)


def test_cider_matches_hand_computed_fixture():
    candidates = [p["candidate"] for p in CAPTION_PAIRS["pairs"]]
    references = [[p["reference"]] for p in CAPTION_PAIRS["pairs"]]
    expected = [p["cider"] for p in CAPTION_PAIRS["pairs"]]
    assert cider_scores(candidates, references) == pytest.approx(expected, abs=1e-6)
    assert cider(candidates, references) == pytest.approx(CAPTION_PAIRS["corpus_cider"], abs=1e-6)


# Trajectory metrics


def test_l2_at_step_and_averaged():
    gt = straight_future()
    pred = _shifted([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    assert l2_horizons(pred, gt) == pytest.approx({"1s": 2.0, "2s": 4.0, "3s": 6.0, "avg": 4.0})
    assert l2_horizons(pred, gt, "averaged") == pytest.approx({"1s": 1.5, "2s": 2.5, "3s": 3.5, "avg": 2.5})


def test_mean_l2_over_samples():
    gt = straight_future()
    result = mean_l2([gt, _shifted([1.0] * 6)], [gt, gt])
    assert result == pytest.approx({"1s": 0.5, "2s": 0.5, "3s": 0.5, "avg": 0.5})


def test_l2_needs_six_waypoints():
    short = Trajectory(waypoints=((1.0, 0.0),) * 5)
    with pytest.raises(ArityError):
        l2_horizons(short, short)


def test_no_collision_on_empty_road():
    rates = collision_rate([straight_future()], [make_scene()])
    assert rates == {"1s": 0.0, "2s": 0.0, "3s": 0.0, "avg": 0.0}


def test_collision_at_second_waypoint_counts_for_every_horizon():
    scene = make_scene(agents=[make_agent(1, x=10.0, y=0.0)])
    assert first_collision_step(straight_future(), scene) == 1
    assert collision_rate([straight_future()], [scene]) == {"1s": 1.0, "2s": 1.0, "3s": 1.0, "avg": 1.0}


def test_late_collision_only_counts_at_long_horizon():
    scene = make_scene(agents=[make_agent(1, x=30.0, y=0.0)])
    assert first_collision_step(straight_future(), scene) == 5
    rates = collision_rate([straight_future()], [scene])
    assert rates["1s"] == 0.0 and rates["2s"] == 0.0 and rates["3s"] == 1.0


def test_collision_uses_agent_future_positions():
    moving = make_agent(1, x=10.0, y=0.0, speed=20.0, future=[(10.0 + 10.0 * k, 0.0) for k in range(1, 7)])
    assert first_collision_step(straight_future(), make_scene(agents=[moving])) is None


def test_collision_needs_six_waypoints():
    with pytest.raises(ArityError):
        first_collision_step(Trajectory(waypoints=((1.0, 0.0),) * 3), make_scene())


# Outline sampling step in meters, well under the 1 cm margin cut-off
OUTLINE_STEP = 0.002


def _outline(x, y, heading, length, width):
    corners = box_corners(x, y, heading, length, width)
    points = []
    for start, end in zip(corners, np.roll(corners, -1, axis=0)):
        n = int(np.ceil(np.linalg.norm(end - start) / OUTLINE_STEP))
        t = np.linspace(0.0, 1.0, n, endpoint=False)[:, None]
        points.append(start + t * (end - start))
    return np.concatenate(points)


def _inside_box(points, x, y, heading, length, width):
    c, s = math.cos(heading), math.sin(heading)
    dx, dy = points[:, 0] - x, points[:, 1] - y
    along = c * dx + s * dy
    across = -s * dx + c * dy
    return (np.abs(along) <= length / 2) & (np.abs(across) <= width / 2)


def _sampled_overlap(a, b) -> bool:
    return bool(_inside_box(_outline(*a), *b).any() or _inside_box(_outline(*b), *a).any())


def _sat_agreement(n_pairs: int, seed: int):
    """(pairs checked, pairs where SAT agrees with point sampling), skipping margins within 1 cm."""
    rng = np.random.default_rng(seed)
    checked = agreed = 0
    for _ in range(n_pairs):
        a = (*rng.uniform(-4, 4, 2), rng.uniform(-math.pi, math.pi), *rng.uniform(0.5, 5.0, 2))
        b = (*rng.uniform(-4, 4, 2), rng.uniform(-math.pi, math.pi), *rng.uniform(0.5, 5.0, 2))
        corners_a, corners_b = box_corners(*a), box_corners(*b)
        if abs(separation_margin(corners_a, corners_b)) <= 0.01:
            continue
        checked += 1
        agreed += polygons_overlap(corners_a, corners_b) == _sampled_overlap(a, b)
    return checked, agreed


def test_separating_axis_test_agrees_with_point_sampling():
    checked, agreed = _sat_agreement(300, seed=7)
    assert checked > 280
    assert agreed == checked


@pytest.mark.slow
def test_separating_axis_test_agrees_with_point_sampling_at_scale():
    checked, agreed = _sat_agreement(10_000, seed=8)
    assert checked > 9_500
    assert agreed >= 0.999 * checked


# Report


def test_score_with_ground_truth_predictions(small_scenes):
    gts = [ground_truth_action(s) for s in small_scenes]
    captions = [make_description_qa(s).answer for s in small_scenes]
    report = score(small_scenes, gts, gts, [s.ego_future for s in small_scenes], captions)
    assert report.accuracy == 1.0
    assert report.joint_accuracy == 1.0
    assert set(report.path_f1.values()) == {1.0}
    assert set(report.speed_f1.values()) == {1.0}
    assert report.l2 == {"1s": 0.0, "2s": 0.0, "3s": 0.0, "avg": 0.0}
    assert 0.0 < report.bleu4 <= 1.0
    assert 0.0 < report.cider <= 10.0


def test_reference_descriptions_are_paraphrases():
    scene = make_scene(agents=[make_agent(1)])
    refs = reference_descriptions(scene)
    assert len(refs) == 2
    assert make_description_qa(scene).answer not in refs


def test_plan_actions_need_every_scene(small_scenes, small_qas):
    assert len(plan_actions(small_scenes, small_qas)) == len(small_scenes)
    with pytest.raises(ConfigError):
        plan_actions(small_scenes, small_qas[:6])


def test_report_rejects_joint_above_marginal(small_scenes):
    gts = [ground_truth_action(s) for s in small_scenes]
    captions = [make_description_qa(s).answer for s in small_scenes]
    report = score(small_scenes, gts, gts, [s.ego_future for s in small_scenes], captions)
    with pytest.raises(ValueError):
        MetricsReport(**{**report.model_dump(), "lateral_accuracy": 0.5})


def test_report_round_trip(tmp_path, small_scenes):
    gts = [ground_truth_action(s) for s in small_scenes]
    captions = [make_description_qa(s).answer for s in small_scenes]
    report = score(small_scenes, gts, gts, [s.ego_future for s in small_scenes], captions)
    path = tmp_path / "report.json"
    write_report(report, path)
    assert read_report(path) == report


@pytest.mark.parametrize("conditioning", ["none", "pred", "gt"])
def test_evaluate_untrained_checkpoint(conditioning, tiny_model, dataset_files, tmp_path):
    scenes_path, qas_path = dataset_files
    ckpt = init_checkpoint(tiny_model)
    report_path = tmp_path / "report.json"
    report = evaluate(ckpt, ckpt, scenes_path, qas_path, report_path, EvalConfig(conditioning=conditioning))
    assert report.n_samples == 24
    assert report.conditioning == conditioning
    assert report_path.exists()
    assert 0.0 <= report.accuracy <= 1.0
