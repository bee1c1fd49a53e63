"""
Evaluation harness: run both models over a labeled dataset and assemble the
decision, caption and trajectory metrics into one report.
"""
import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.autolabel.templates import N_DESCRIPTION_VARIANTS, density_bucket, render_description
from src.core.config import ConfigModel
from src.core.exceptions import ConfigError, DatasetIOError
from src.core.logging_config import app_logger
from src.domain.codec import read_qas, read_scenes
from src.domain.types import QARecord, Scene, Trajectory
from src.domain.vocabulary import MetaAction, QAType
from src.metrics.captions import bleu4, cider, meteor_lite_multi
from src.metrics.decision import accuracy, axis_accuracy, f1_table, joint_accuracy
from src.metrics.trajectory import collision_rate, mean_l2
from src.planner.checkpoint import Checkpoint, load_checkpoint
from src.planner.config import ViewMode
from src.planner.e2e import plan_batch
from src.planner.features import scene_batch
from src.planner.params import E2EParams, VlmLiteParams
from src.planner.vlm import actions_from_outputs, describe_from_outputs, predict_batch

Conditioning = Literal["none", "pred", "gt"]


class EvalConfig(ConfigModel):
    conditioning: Conditioning = "pred"
    accuracy_mode: Literal["joint", "per_axis"] = "joint"
    l2_mode: Literal["at_step", "averaged"] = "at_step"
    views: ViewMode = "surround"
    batch_size: int = Field(default=256, ge=1)


def _fraction(value: float) -> bool:
    return 0.0 <= value <= 1.0


class MetricsReport(BaseModel):
    """Evaluation summary; percentages are stored as fractions."""

    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(ge=1)
    conditioning: Conditioning
    accuracy_mode: str
    l2_mode: str
    views: str
    accuracy: float
    joint_accuracy: float
    lateral_accuracy: float
    longitudinal_accuracy: float
    path_f1: Dict[str, float]
    speed_f1: Dict[str, float]
    bleu4: float
    cider: float = Field(ge=0.0, le=10.0)
    meteor_lite: float
    l2: Dict[str, float]
    collision: Dict[str, float]

    @model_validator(mode="after")
    def _check(self):
        fractions = [
            self.accuracy,
            self.joint_accuracy,
            self.lateral_accuracy,
            self.longitudinal_accuracy,
            self.bleu4,
            self.meteor_lite,
            *self.path_f1.values(),
            *self.speed_f1.values(),
            *self.collision.values(),
        ]
        if not all(_fraction(v) for v in fractions):
            raise ValueError("fractions must lie in [0, 1]")
        if any(v < 0 for v in self.l2.values()):
            raise ValueError("l2 must be >= 0")
        if self.joint_accuracy > min(self.lateral_accuracy, self.longitudinal_accuracy) + 1e-12:
            raise ValueError("joint accuracy exceeds a marginal accuracy")
        return self


def reference_descriptions(scene: Scene) -> List[str]:
    """Held-out paraphrases of the ground-truth description (every variant but the canonical one)."""
    density = density_bucket(len(scene.agents))
    return [
        render_description(density, scene.traffic_light, len(scene.vrus), variant)
        for variant in range(1, N_DESCRIPTION_VARIANTS)
    ]


def plan_actions(scenes: Sequence[Scene], qas: Sequence[QARecord]) -> List[MetaAction]:
    """Ground-truth actions from the plan QA records, in scene order."""
    plans = {qa.scene_id: qa.answer for qa in qas if qa.qa_type is QAType.PLAN}
    missing = [s.scene_id for s in scenes if s.scene_id not in plans]
    if missing:
        raise ConfigError(f"{len(missing)} scenes have no plan QA record (first: {missing[0]})")
    return [MetaAction.parse(plans[s.scene_id]) for s in scenes]


def score(
    scenes: Sequence[Scene],
    gt_actions: Sequence[MetaAction],
    pred_actions: Sequence[MetaAction],
    planned: Sequence[Trajectory],
    captions: Sequence[str],
    config: EvalConfig = EvalConfig(),
) -> MetricsReport:
    """Metrics for already computed predictions."""
    futures = [s.ego_future for s in scenes]
    if any(f is None for f in futures):
        raise ConfigError("every evaluated scene needs an ego_future")
    references = [reference_descriptions(s) for s in scenes]

    return MetricsReport(
        n_samples=len(scenes),
        conditioning=config.conditioning,
        accuracy_mode=config.accuracy_mode,
        l2_mode=config.l2_mode,
        views=config.views,
        accuracy=accuracy(pred_actions, gt_actions, config.accuracy_mode),
        joint_accuracy=joint_accuracy(pred_actions, gt_actions),
        lateral_accuracy=axis_accuracy(pred_actions, gt_actions, "lateral"),
        longitudinal_accuracy=axis_accuracy(pred_actions, gt_actions, "longitudinal"),
        path_f1=f1_table(pred_actions, gt_actions, "lateral"),
        speed_f1=f1_table(pred_actions, gt_actions, "longitudinal"),
        bleu4=float(np.mean([bleu4(c, refs) for c, refs in zip(captions, references)])),
        cider=cider(captions, references),
        meteor_lite=float(np.mean([meteor_lite_multi(c, refs) for c, refs in zip(captions, references)])),
        l2=mean_l2(planned, futures, config.l2_mode),
        collision=collision_rate(planned, scenes),
    )


def _as_checkpoint(source: Union[str, Path, Checkpoint]) -> Checkpoint:
    return source if isinstance(source, Checkpoint) else load_checkpoint(source)


def run_models(
    scenes: Sequence[Scene],
    vlm: VlmLiteParams,
    e2e: E2EParams,
    gt_actions: Sequence[MetaAction],
    config: EvalConfig = EvalConfig(),
) -> tuple:
    """
    Predicted actions, planned trajectories and captions for every scene.

    Models only see scenes with their ground-truth future erased.
    """
    vlm.check_finite()
    e2e.check_finite()
    actions: List[MetaAction] = []
    planned: List[Trajectory] = []
    captions: List[str] = []
    for start in range(0, len(scenes), config.batch_size):
        chunk = [s.without_future() for s in scenes[start:start + config.batch_size]]
        batch = scene_batch(chunk)
        outputs = predict_batch(batch, vlm, config.views)
        predicted = actions_from_outputs(outputs)
        if config.conditioning == "pred":
            conditioning = [a.index for a in predicted]
        elif config.conditioning == "gt":
            conditioning = [a.index for a in gt_actions[start:start + len(chunk)]]
        else:
            conditioning = None
        waypoints = plan_batch(batch, e2e, conditioning)
        actions.extend(predicted)
        planned.extend(Trajectory.from_array(w) for w in waypoints)
        captions.extend(describe_from_outputs(outputs, row) for row in range(len(chunk)))
    return actions, planned, captions


def evaluate(
    vlm_checkpoint: Union[str, Path, Checkpoint],
    e2e_checkpoint: Union[str, Path, Checkpoint],
    scenes_path: Union[str, Path],
    qas_path: Union[str, Path],
    report_path: Optional[Union[str, Path]] = None,
    config: EvalConfig = EvalConfig(),
) -> MetricsReport:
    """
    Evaluate trained checkpoints on a labeled dataset.

    Args:
        vlm_checkpoint: Checkpoint (or path) holding ``vlm.*``
        e2e_checkpoint: Checkpoint (or path) holding ``e2e.*`` and ``emb.e_act``
        scenes_path: Scene JSONL
        qas_path: QA JSONL with plan records for every scene
        report_path: Where to write the JSON report, if given
        config: Conditioning source, metric conventions and view mode

    Returns:
        The metrics report
    """
    vlm = VlmLiteParams.from_checkpoint(_as_checkpoint(vlm_checkpoint))
    e2e = E2EParams.from_checkpoint(_as_checkpoint(e2e_checkpoint))
    scenes = read_scenes(scenes_path)
    if not scenes:
        raise ConfigError(f"no scenes in {scenes_path}")
    gt_actions = plan_actions(scenes, read_qas(qas_path))

    app_logger.info(f"Evaluating {len(scenes)} scenes (conditioning={config.conditioning}, views={config.views})")
    actions, planned, captions = run_models(scenes, vlm, e2e, gt_actions, config)
    report = score(scenes, gt_actions, actions, planned, captions, config)

    if report_path is not None:
        write_report(report, report_path)
    app_logger.info(
        f"✅ Evaluation done: acc={report.accuracy:.4f} l2_avg={report.l2['avg']:.3f} "
        f"collision_avg={report.collision['avg']:.4f}"
    )
    return report


def write_report(report: MetricsReport, path: Union[str, Path]) -> None:
    try:
        Path(path).write_text(json.dumps(report.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot write report {path}: {e}") from e
    app_logger.info(f"Wrote metrics report to {path}")


def read_report(path: Union[str, Path]) -> MetricsReport:
    try:
        return MetricsReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetIOError(f"cannot read report {path}: {e}") from e
