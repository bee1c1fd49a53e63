"""
Training targets parsed from QA answers, aligned with the scene order.
"""
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from src.autolabel.templates import count_listed, first_motion_action, parse_description
from src.core.exceptions import SchemaError
from src.core.logging_config import app_logger
from src.domain.types import QARecord, Scene
from src.domain.vocabulary import TRAFFIC_LIGHT_ORDER, MetaAction, QAType, TrafficLightState


@dataclass(frozen=True, eq=False)
class Target:
    values: np.ndarray
    mask: np.ndarray

    def take(self, idx: np.ndarray) -> "Target":
        return Target(values=self.values[idx], mask=self.mask[idx])

    @property
    def count(self) -> int:
        return int(self.mask.sum())


def _light_index(answer: str) -> int:
    try:
        return TRAFFIC_LIGHT_ORDER.index(TrafficLightState(answer.strip()))
    except ValueError as e:
        raise SchemaError(f"not a traffic light state: {answer!r}", field="answer") from e


def _parsers():
    return {
        "density": (QAType.DESCRIPTION, lambda a: parse_description(a)[0]),
        "probe_light": (QAType.DESCRIPTION, lambda a: TRAFFIC_LIGHT_ORDER.index(parse_description(a)[1])),
        "traffic_light": (QAType.TRAFFIC_LIGHT, _light_index),
        "vru": (QAType.VRU, count_listed),
        "motion": (QAType.MOTION, first_motion_action),
        "plan": (QAType.PLAN, MetaAction.parse),
    }


def build_targets(scenes: Sequence[Scene], qas: Sequence[QARecord]) -> Dict[str, Target]:
    """
    Parse every QA-derived target once.

    Rows without a usable answer are masked: a missing QA record, a motion
    answer with no vehicle, or an answer that fails to parse (logged).
    """
    by_key = {(qa.scene_id, qa.qa_type): qa.answer for qa in qas}
    row_of = {scene.scene_id: i for i, scene in enumerate(scenes)}
    orphans = {qa.scene_id for qa in qas} - set(row_of)
    if orphans:
        app_logger.warning(f"{len(orphans)} scene ids in the QA file have no scene; ignored")

    targets = {}
    for name, (qa_type, parse) in _parsers().items():
        values = np.zeros(len(scenes))
        mask = np.zeros(len(scenes))
        skipped = 0
        for i, scene in enumerate(scenes):
            answer = by_key.get((scene.scene_id, qa_type))
            if answer is None:
                continue
            try:
                parsed = parse(answer)
            except SchemaError:
                skipped += 1
                continue
            if parsed is None:
                continue
            values[i] = parsed.index if isinstance(parsed, MetaAction) else float(parsed)
            mask[i] = 1.0
        if skipped:
            app_logger.warning(f"Skipped {skipped} unparsable '{qa_type.value}' answers for target '{name}'")
        targets[name] = Target(values=values, mask=mask)
    return targets
