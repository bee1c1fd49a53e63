"""
Driving vision adapter: project, compress and assemble multi-view tokens.
"""
from src.vision_adapter.adapter import (
    TokenSequence,
    assemble_multiview_sequence,
    compress_view_tokens,
    compress_views,
    encode_views,
    project_patch_features,
    project_patches,
)
from src.vision_adapter.params import M_IMG_GRID, AdapterConfig, AdapterParams, init_adapter_params

__all__ = [
    "M_IMG_GRID",
    "AdapterConfig",
    "AdapterParams",
    "TokenSequence",
    "assemble_multiview_sequence",
    "compress_view_tokens",
    "compress_views",
    "encode_views",
    "init_adapter_params",
    "project_patch_features",
    "project_patches",
]
