"""
CLI configuration: one JSON document merged under command-line flags.

Precedence is defaults < config file < flags.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import Field

from src.autolabel.rules import LabelThresholds
from src.core.config import ConfigModel, settings
from src.core.exceptions import ConfigError, DatasetIOError
from src.metrics.report import EvalConfig
from src.planner.config import ModelConfig
from src.simworld.config import SimConfig
from src.training.config import STAGE_ORDER, E2ETrainConfig, StageConfig, default_stage_config


class CliConfig(ConfigModel):
    seed: int = Field(default=settings.seed, ge=0)
    jobs: int = Field(default=settings.jobs, ge=1)
    sim: SimConfig = SimConfig()
    labels: LabelThresholds = LabelThresholds()
    model: ModelConfig = ModelConfig()
    # Per-stage overrides of the default stage configs, keyed by stage name
    stages: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    e2e: E2ETrainConfig = E2ETrainConfig()
    eval: EvalConfig = EvalConfig()

    def stage_config(self, stage: str) -> StageConfig:
        overrides = {"seed": self.seed, **self.stages.get(stage, {})}
        return default_stage_config(stage, **overrides)

    def with_overrides(self, section: Optional[str] = None, **values) -> "CliConfig":
        """
        Copy with flag values applied; ``None`` values are ignored.

        Args:
            section: Nested section to update (``sim``, ``labels``, ...), or
                None for top-level fields
            **values: Field values to replace
        """
        values = {k: v for k, v in values.items() if v is not None}
        if not values:
            return self
        fields = {name: getattr(self, name) for name in type(self).model_fields}
        if section is None:
            fields.update(values)
        else:
            current = fields[section]
            fields[section] = type(current)(**{**current.model_dump(), **values})
        return CliConfig(**fields)


def load_cli_config(path: Optional[Union[str, Path]]) -> CliConfig:
    """Read and validate a JSON config file; no path gives the defaults."""
    if path is None:
        return CliConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot read config {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = sorted(set(doc.get("stages", {})) - set(STAGE_ORDER))
    if unknown:
        raise ConfigError(f"config {path}: unknown stages {unknown}")
    return CliConfig(**doc)
