"""
Training: three-stage VLM-lite schedule and teacher-forced E2E-lite training.
"""
from src.training.config import STAGE_ORDER, E2ETrainConfig, StageConfig, default_stage_config, stages_from_numbers
from src.training.e2e_training import train_e2e
from src.training.loss_log import write_loss_csv
from src.training.stages import freeze_mask, run_stage, run_three_stage

__all__ = [
    "E2ETrainConfig",
    "STAGE_ORDER",
    "StageConfig",
    "default_stage_config",
    "freeze_mask",
    "run_stage",
    "run_three_stage",
    "stages_from_numbers",
    "train_e2e",
    "write_loss_csv",
]
