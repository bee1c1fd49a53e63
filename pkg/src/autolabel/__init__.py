"""
Planning-oriented QA auto-labelling.
"""
from src.autolabel.pipeline import label_dataset
from src.autolabel.qa import (
    ground_truth_action,
    label_scene,
    make_description_qa,
    make_explanation_qa,
    make_motion_qa,
    make_plan_qa,
    make_traffic_light_qa,
    make_vru_qa,
)
from src.autolabel.rules import DEFAULT_THRESHOLDS, LabelThresholds, derive_meta_action

__all__ = [
    "DEFAULT_THRESHOLDS",
    "LabelThresholds",
    "derive_meta_action",
    "ground_truth_action",
    "label_dataset",
    "label_scene",
    "make_description_qa",
    "make_explanation_qa",
    "make_motion_qa",
    "make_plan_qa",
    "make_traffic_light_qa",
    "make_vru_qa",
]
