"""
Evaluation metrics and the report harness.
"""
from src.metrics.captions import bleu4, cider, meteor_lite, tokenize
from src.metrics.decision import axis_accuracy, f1_table, joint_accuracy, per_class_f1
from src.metrics.report import EvalConfig, MetricsReport, evaluate, read_report, score
from src.metrics.trajectory import collision_rate, l2_horizons

__all__ = [
    "EvalConfig",
    "MetricsReport",
    "axis_accuracy",
    "bleu4",
    "cider",
    "collision_rate",
    "evaluate",
    "f1_table",
    "joint_accuracy",
    "l2_horizons",
    "meteor_lite",
    "per_class_f1",
    "read_report",
    "score",
    "tokenize",
]
