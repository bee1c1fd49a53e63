"""
Stage and E2E training configuration.
"""
from typing import Dict, Literal, Tuple

from pydantic import Field, model_validator

from src.core.config import ConfigModel
from src.core.exceptions import ConfigError
from src.domain.vocabulary import QAType
from src.planner.config import ViewMode

StageName = Literal["mix_pretrain", "driving_finetune", "planning_finetune"]
STAGE_ORDER: Tuple[str, ...] = ("mix_pretrain", "driving_finetune", "planning_finetune")

# Loss term -> QA type its targets are parsed from (None: derived from the input)
LOSS_TERM_SOURCES = {
    "density": QAType.DESCRIPTION,
    "probe_light": QAType.DESCRIPTION,
    "recon": None,
    "traffic_light": QAType.TRAFFIC_LIGHT,
    "vru": QAType.VRU,
    "motion": QAType.MOTION,
    "plan": QAType.PLAN,
}


class StageConfig(ConfigModel):
    stage: StageName
    trainable: Tuple[str, ...]
    loss_terms: Dict[str, float]
    epochs: int = Field(default=10, ge=1)
    batch_size: int = Field(default=32, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    seed: int = Field(default=0, ge=0)
    views: ViewMode = "surround"

    @model_validator(mode="after")
    def _check(self):
        if not self.trainable:
            raise ValueError("trainable prefixes must not be empty")
        if not self.loss_terms:
            raise ValueError("at least one loss term is required")
        unknown = sorted(set(self.loss_terms) - set(LOSS_TERM_SOURCES))
        if unknown:
            raise ValueError(f"unknown loss terms {unknown}")
        if any(w <= 0 for w in self.loss_terms.values()):
            raise ValueError("loss weights must be > 0")
        return self


# Stage 1 mixes driving attribute targets with the general reconstruction task 1:1
_DEFAULTS = {
    "mix_pretrain": dict(
        trainable=("vlm.adapter.", "vlm.probe."),
        loss_terms={"density": 0.5, "probe_light": 0.5, "recon": 1.0},
        epochs=10,
        views="front",
    ),
    "driving_finetune": dict(
        trainable=("vlm.",),
        loss_terms={"traffic_light": 1.0, "vru": 1.0, "motion": 1.0},
        epochs=10,
    ),
    "planning_finetune": dict(
        trainable=("vlm.",),
        loss_terms={"plan": 1.0},
        epochs=20,
    ),
}


def default_stage_config(stage: str, **overrides) -> StageConfig:
    if stage not in _DEFAULTS:
        raise ConfigError(f"unknown stage '{stage}'; expected one of {list(STAGE_ORDER)}")
    return StageConfig(stage=stage, **{**_DEFAULTS[stage], **overrides})


def stages_from_numbers(numbers: str) -> Tuple[str, ...]:
    """'1,2,3' -> stage names in order; rejects unknown, repeated or unordered lists."""
    try:
        picked = [int(part) for part in numbers.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid stage list '{numbers}'") from e
    if not picked or any(n not in (1, 2, 3) for n in picked) or picked != sorted(set(picked)):
        raise ConfigError(f"invalid stage list '{numbers}': use increasing numbers from 1-3")
    return tuple(STAGE_ORDER[n - 1] for n in picked)


class E2ETrainConfig(ConfigModel):
    epochs: int = Field(default=10, ge=1)
    batch_size: int = Field(default=32, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    seed: int = Field(default=0, ge=0)
    conditioning: Literal["gt", "none"] = "gt"
