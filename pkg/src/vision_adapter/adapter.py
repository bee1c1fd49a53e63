"""
Driving vision adapter: patch projection, per-view query compression and
multi-view sequence assembly.

The batched functions work on (B, V, P, C) inputs and back the model forward
passes; the single-view operations wrap them for direct use and tests.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.autodiff import ops
from src.autodiff.layers import attention
from src.autodiff.node import Node
from src.core.exceptions import ArityError, ConfigError, IndexRangeError, NumericError, ShapeError
from src.domain.vocabulary import N_VIEWS, VIEW_ORDER, View
from src.simworld.rasterizer import ViewFeatureGrid
from src.vision_adapter.params import AdapterParams

VIEW_TAG = "view"
IMAGE_TAG = "image"
TEXT_TAG = "text"


@dataclass(frozen=True, eq=False)
class TokenSequence:
    """Ordered tokens (L, C) with one source tag per token."""

    tokens: np.ndarray
    tags: Tuple[str, ...]

    def __post_init__(self):
        if self.tokens.shape[0] != len(self.tags):
            raise ArityError(f"{self.tokens.shape[0]} tokens but {len(self.tags)} tags")

    def __len__(self) -> int:
        return len(self.tags)


def _check_finite(name: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise NumericError(f"{name}: non-finite values")


def project_patches(patches, params: AdapterParams) -> Node:
    """W2 . GELU(W1 . x + b1) + b2 over the last axis, any leading shape."""
    patches = ops.as_node(patches)
    _check_finite("patches", patches.value)
    hidden = ops.gelu(ops.add(ops.matmul(patches, params["W1"]), params["b1"]))
    return ops.add(ops.matmul(hidden, params["W2"]), params["b2"])


def canonical_key_order(projected: np.ndarray) -> np.ndarray:
    """Per-slice lexicographic row order of (..., P, C) keys."""
    flat = projected.reshape(-1, projected.shape[-2], projected.shape[-1])
    order = np.stack([np.lexsort(block.T[::-1]) for block in flat])
    return order.reshape(projected.shape[:-1])


def compress_views(projected, view_ids: Sequence[int], params: AdapterParams) -> Tuple[Node, np.ndarray]:
    """
    Cross-attend each view's queries over its projected patches.

    Args:
        projected: (B, V, P, C) projected patch features
        view_ids: Index into VIEW_ORDER of each of the V blocks
        params: Adapter parameters

    Returns:
        Compressed tokens (B, V, M_img, C) and attention weights (B, V, h, M_img, P)
    """
    projected = ops.as_node(projected)
    _check_finite("projected", projected.value)
    n_patches = projected.shape[-2]
    if params.m_img > n_patches:
        raise ConfigError(f"m_img {params.m_img} > {n_patches} patches: expansion is not allowed")
    if projected.shape[1] != len(view_ids):
        raise ShapeError("compress_views", projected.shape, (len(view_ids),))
    # Keys in a content-defined order make the reduction independent of patch order
    keys = ops.permute_rows(projected, canonical_key_order(projected.value))
    queries = ops.take_rows(params["q_img"], np.asarray(view_ids, dtype=np.int64))
    return attention(queries, keys, params.tensors, f"{params.prefix}.attn", params.heads)


def interleave_tags(compressed, view_ids: Sequence[int], params: AdapterParams) -> Node:
    """(B, V, M, C) -> (B, V * (1 + M), C) with each view's tag before its tokens."""
    compressed = ops.as_node(compressed)
    batch, n_views, _, width = compressed.shape
    tags = ops.take_rows(params["view_tags"], np.asarray(view_ids, dtype=np.int64))
    tags = ops.broadcast_to(ops.reshape(tags, (1, n_views, 1, width)), (batch, n_views, 1, width))
    blocks = ops.concat([tags, compressed], axis=2)
    return ops.reshape(blocks, (batch, n_views * blocks.shape[2], width))


def encode_views(views, view_ids: Sequence[int], params: AdapterParams) -> Node:
    """Raster stack (B, V, P, C_vis) -> tagged image tokens (B, V * (1 + M), C)."""
    compressed, _ = compress_views(project_patches(views, params), view_ids, params)
    return interleave_tags(compressed, view_ids, params)


def sequence_tags(views: Sequence[View], m_img: int, n_text: int) -> Tuple[str, ...]:
    tags = []
    for view in views:
        tags.append(f"{VIEW_TAG}:{view.value}")
        tags.extend([f"{IMAGE_TAG}:{view.value}"] * m_img)
    tags.extend([TEXT_TAG] * n_text)
    return tuple(tags)


# Single-view operations


def project_patch_features(grid: Union[ViewFeatureGrid, np.ndarray], params: AdapterParams) -> np.ndarray:
    """Projected features (P, C) of one view."""
    patches = grid.patches if isinstance(grid, ViewFeatureGrid) else np.asarray(grid, dtype=np.float64)
    return project_patches(patches, params).value


def compress_view_tokens(view_index: int, projected, params: AdapterParams) -> np.ndarray:
    """Compress one view's (P, C) projected features to (M_img, C) tokens."""
    if not 0 <= view_index < N_VIEWS:
        raise IndexRangeError(f"view index {view_index} outside [0, {N_VIEWS})")
    projected = ops.as_node(projected)
    if projected.value.ndim != 2:
        raise ShapeError("compress_view_tokens", projected.shape)
    out, _ = compress_views(ops.reshape(projected, (1, 1) + projected.shape), [view_index], params)
    return out.value[0, 0]


def attention_weights(view_index: int, projected, params: AdapterParams) -> np.ndarray:
    """Attention weights (h, M_img, P) of one view, keys in canonical order."""
    block = np.asarray(projected, dtype=np.float64)[None, None]
    _, weights = compress_views(block, [view_index], params)
    return weights[0, 0]


def assemble_multiview_sequence(
    view_tokens,
    text_tokens,
    params: AdapterParams,
    views: Sequence[View] = tuple(VIEW_ORDER),
) -> TokenSequence:
    """
    Lay out [tag(v), img(v)] for every view in order, then the text tokens.

    Args:
        view_tokens: (V, M_img, C) compressed tokens, one block per view
        text_tokens: (M_txt, C) text tokens
        params: Adapter parameters holding the view tags
        views: Views the blocks belong to (all six by default)

    Returns:
        TokenSequence of length V * (1 + M_img) + M_txt
    """
    view_tokens = np.asarray(view_tokens, dtype=np.float64)
    text_tokens = np.asarray(text_tokens, dtype=np.float64).reshape(-1, view_tokens.shape[-1])
    if view_tokens.ndim != 3 or view_tokens.shape[0] != len(views):
        raise ArityError(f"expected {len(views)} view blocks, got {view_tokens.shape[0] if view_tokens.ndim else 0}")
    view_ids = [VIEW_ORDER.index(v) for v in views]
    image = interleave_tags(view_tokens[None], view_ids, params)
    tokens = np.concatenate([image.value[0], text_tokens], axis=0)
    return TokenSequence(tokens=tokens, tags=sequence_tags(views, view_tokens.shape[1], text_tokens.shape[0]))
