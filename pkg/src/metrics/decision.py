"""
Meta-action decision metrics: joint / marginal accuracy and one-vs-rest F1.
"""
from typing import Dict, Literal, Sequence

from src.core.exceptions import ArityError
from src.domain.vocabulary import LATERAL_ORDER, LONGITUDINAL_ORDER, MetaAction

Axis = Literal["lateral", "longitudinal"]


def _check_pairs(preds: Sequence, gts: Sequence) -> None:
    if len(preds) != len(gts):
        raise ArityError(f"{len(preds)} predictions for {len(gts)} ground-truth actions")
    if not preds:
        raise ArityError("no samples to score")


def joint_accuracy(preds: Sequence[MetaAction], gts: Sequence[MetaAction]) -> float:
    """Fraction of samples where both lateral and longitudinal decisions match."""
    _check_pairs(preds, gts)
    return sum(p == g for p, g in zip(preds, gts)) / len(gts)


def axis_accuracy(preds: Sequence[MetaAction], gts: Sequence[MetaAction], axis: Axis) -> float:
    _check_pairs(preds, gts)
    return sum(getattr(p, axis) == getattr(g, axis) for p, g in zip(preds, gts)) / len(gts)


def accuracy(preds: Sequence[MetaAction], gts: Sequence[MetaAction], mode: str = "joint") -> float:
    """``joint`` exact match, or ``per_axis``: mean of the two marginal accuracies."""
    if mode == "per_axis":
        return (axis_accuracy(preds, gts, "lateral") + axis_accuracy(preds, gts, "longitudinal")) / 2.0
    return joint_accuracy(preds, gts)


def per_class_f1(preds: Sequence[MetaAction], gts: Sequence[MetaAction], label, axis: Axis) -> float:
    """
    One-vs-rest F1 for one lateral or longitudinal class.

    A class that is neither predicted nor present scores 1.0.
    """
    _check_pairs(preds, gts)
    tp = fp = fn = 0
    for p, g in zip(preds, gts):
        hit_p, hit_g = getattr(p, axis) == label, getattr(g, axis) == label
        tp += hit_p and hit_g
        fp += hit_p and not hit_g
        fn += hit_g and not hit_p
    if tp == 0:
        return 1.0 if fp == 0 and fn == 0 else 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def f1_table(preds: Sequence[MetaAction], gts: Sequence[MetaAction], axis: Axis) -> Dict[str, float]:
    """F1 for every class on one axis, keyed by the lowercased class name."""
    classes = LATERAL_ORDER if axis == "lateral" else LONGITUDINAL_ORDER
    return {c.value.lower(): per_class_f1(preds, gts, c, axis) for c in classes}
