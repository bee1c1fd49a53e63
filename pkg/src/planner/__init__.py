"""
Structured planner: VLM-lite meta-action classifier, meta-action encoder and
E2E-lite trajectory decoder.
"""
from src.planner.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from src.planner.config import ModelConfig
from src.planner.e2e import e2e_plan, encode_meta_action
from src.planner.inference import InferenceResult, infer
from src.planner.params import E2EParams, MetaActionEmbeddings, VlmLiteParams, init_checkpoint
from src.planner.vlm import predict_meta_action, vlm_forward

__all__ = [
    "Checkpoint",
    "E2EParams",
    "InferenceResult",
    "MetaActionEmbeddings",
    "ModelConfig",
    "VlmLiteParams",
    "e2e_plan",
    "encode_meta_action",
    "infer",
    "init_checkpoint",
    "load_checkpoint",
    "predict_meta_action",
    "save_checkpoint",
    "vlm_forward",
]
