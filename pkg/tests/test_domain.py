"""
Tests for the domain vocabulary, records, validation and JSONL codec.
"""
import json
import math

import pytest

from src.core.exceptions import IndexRangeError, RecordParseError, SchemaError, SerializationError
from src.domain.codec import decode_record, encode_record, read_scenes, write_records
from src.domain.types import QARecord, Trajectory, quantize, wrap_angle
from src.domain.validation import validate_scene
from src.domain.vocabulary import (
    ALL_META_ACTIONS,
    Lateral,
    Longitudinal,
    MetaAction,
    QAType,
    meta_action_from_index,
    meta_action_index,
)
from tests.helpers import make_agent, make_scene


def test_meta_action_index_follows_joint_order():
    assert meta_action_index(MetaAction(lateral=Lateral.LEFT, longitudinal=Longitudinal.ACCELERATE)) == 0
    assert meta_action_index(MetaAction(lateral=Lateral.STRAIGHT, longitudinal=Longitudinal.KEEP)) == 5
    assert meta_action_index(MetaAction(lateral=Lateral.RIGHT, longitudinal=Longitudinal.STOP)) == 11


def test_meta_action_from_index_inverts_index():
    assert meta_action_from_index(0) == MetaAction(lateral=Lateral.LEFT, longitudinal=Longitudinal.ACCELERATE)
    assert meta_action_from_index(11) == MetaAction(lateral=Lateral.RIGHT, longitudinal=Longitudinal.STOP)
    assert [meta_action_index(a) for a in ALL_META_ACTIONS] == list(range(12))


@pytest.mark.parametrize("bad", [12, -1, 1.5, True])
def test_meta_action_from_index_rejects_out_of_range(bad):
    with pytest.raises(IndexRangeError):
        meta_action_from_index(bad)


def test_meta_action_parse_and_render():
    action = MetaAction.parse("Left, Decelerate")
    assert action == MetaAction(lateral=Lateral.LEFT, longitudinal=Longitudinal.DECELERATE)
    assert str(action) == "Left, Decelerate"
    with pytest.raises(SchemaError):
        MetaAction.parse("Sideways, Keep")
    with pytest.raises(SchemaError):
        MetaAction.parse("Left")


def test_quantize_and_wrap_angle():
    assert quantize(1.23456789) == 1.234568
    assert math.isnan(quantize(float("nan")))
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-6)
    assert -math.pi < wrap_angle(-math.pi) <= math.pi


def test_minimal_scene_encodes_empty_agent_list():
    line = encode_record(make_scene())
    assert '"agents":[]' in line
    assert "\n" not in line


def test_generated_scenes_round_trip(small_scenes):
    for scene in small_scenes:
        assert decode_record(encode_record(scene)) == scene


def test_qa_record_round_trip():
    record = QARecord(scene_id="scene-000001", qa_type=QAType.PLAN, question="q?", answer="Straight, Keep")
    assert decode_record(encode_record(record)) == record


def test_floats_are_written_with_six_decimals():
    doc = encode_record(make_scene(ego_speed=3.0))
    assert '"speed":3.000000' in doc


def test_nan_coordinate_cannot_be_serialized():
    future = Trajectory(waypoints=tuple((float("nan"), 0.0) for _ in range(6)))
    with pytest.raises(SerializationError):
        encode_record(make_scene(ego_future=future))


def test_decode_malformed_json():
    with pytest.raises(RecordParseError):
        decode_record("{", line_number=7)


def test_decode_unknown_traffic_light_names_field():
    doc = json.loads(encode_record(make_scene()))
    doc["traffic_light"] = "blue"
    with pytest.raises(SchemaError) as info:
        decode_record(json.dumps(doc), line_number=3)
    assert "traffic_light" in info.value.field
    assert info.value.line_number == 3


def test_validate_generated_scene_is_clean(small_scenes):
    assert all(validate_scene(s) == [] for s in small_scenes)


def test_validate_reports_zero_width_agent():
    scene = make_scene(agents=[make_agent(3, width=0.0)])
    violations = validate_scene(scene)
    assert len(violations) == 1
    assert "agent 3" in violations[0]


def test_validate_reports_short_ego_future():
    future = Trajectory(waypoints=tuple((float(k), 0.0) for k in range(1, 6)))
    violations = validate_scene(make_scene(ego_future=future))
    assert len(violations) == 1
    assert "waypoint count" in violations[0]


def test_read_scenes_reports_line_number(tmp_path, small_scenes):
    path = tmp_path / "scenes.jsonl"
    write_records(path, small_scenes[:2])
    with path.open("a", encoding="utf-8") as fh:
        fh.write("{not json\n")
    with pytest.raises(RecordParseError) as info:
        read_scenes(path)
    assert info.value.line_number == 3
