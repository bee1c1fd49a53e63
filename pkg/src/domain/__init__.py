"""
Shared domain types, the meta-action vocabulary and the JSONL codec.
"""
from src.domain.codec import decode_record, encode_record, read_qas, read_scenes, write_records
from src.domain.types import AgentState, EgoState, QARecord, Scene, Trajectory, quantize, wrap_angle
from src.domain.validation import validate_scene
from src.domain.vocabulary import (
    ALL_META_ACTIONS,
    DT,
    HORIZON_STEPS,
    N_ACT,
    T_STEPS,
    VIEW_ORDER,
    AgentClass,
    Lateral,
    Longitudinal,
    MetaAction,
    NavCommand,
    QAType,
    TrafficLightState,
    View,
    meta_action_from_index,
    meta_action_index,
)

__all__ = [
    "ALL_META_ACTIONS",
    "DT",
    "HORIZON_STEPS",
    "N_ACT",
    "T_STEPS",
    "VIEW_ORDER",
    "AgentClass",
    "AgentState",
    "EgoState",
    "Lateral",
    "Longitudinal",
    "MetaAction",
    "NavCommand",
    "QARecord",
    "QAType",
    "Scene",
    "TrafficLightState",
    "Trajectory",
    "View",
    "decode_record",
    "encode_record",
    "meta_action_from_index",
    "meta_action_index",
    "quantize",
    "read_qas",
    "read_scenes",
    "validate_scene",
    "wrap_angle",
    "write_records",
]
