"""
Layers composed from the primitives: dense, feed-forward, multi-head attention
and pre-norm transformer blocks.

Parameters are looked up by dotted name in a mapping of Nodes, so the same
code runs for inference (constant leaves) and training (trainable leaves).
"""
import math
from typing import Mapping, Optional, Tuple

import numpy as np

from src.autodiff import ops
from src.autodiff.node import Node
from src.core.exceptions import ShapeError

Params = Mapping[str, Node]


def dense(x, params: Params, prefix: str) -> Node:
    return ops.add(ops.matmul(x, params[f"{prefix}.W"]), params[f"{prefix}.b"])


def feed_forward(x, params: Params, prefix: str) -> Node:
    hidden = ops.gelu(ops.add(ops.matmul(x, params[f"{prefix}.W1"]), params[f"{prefix}.b1"]))
    return ops.add(ops.matmul(hidden, params[f"{prefix}.W2"]), params[f"{prefix}.b2"])


def _project(x, params: Params, prefix: str, which: str) -> Node:
    return ops.add(ops.matmul(x, params[f"{prefix}.W{which}"]), params[f"{prefix}.b{which}"])


def _split_heads(x: Node, heads: int) -> Node:
    *lead, length, width = x.shape
    split = ops.reshape(x, tuple(lead) + (length, heads, width // heads))
    nd = len(lead) + 3
    return ops.transpose(split, tuple(range(nd - 3)) + (nd - 2, nd - 3, nd - 1))


def _merge_heads(x: Node) -> Node:
    *lead, heads, length, head_dim = x.shape
    nd = len(lead) + 3
    merged = ops.transpose(x, tuple(range(nd - 3)) + (nd - 2, nd - 3, nd - 1))
    return ops.reshape(merged, tuple(lead) + (length, heads * head_dim))


def attention(
    queries,
    keys_values,
    params: Params,
    prefix: str,
    heads: int,
) -> Tuple[Node, np.ndarray]:
    """
    Multi-head scaled dot-product attention.

    Args:
        queries: (..., M, C) query inputs
        keys_values: (..., N, C) inputs used for both keys and values
        params: Parameter mapping holding ``{prefix}.Wq/bq/Wk/bk/Wv/bv/Wo/bo``
        prefix: Dotted name of the attention layer
        heads: Number of heads; must divide C

    Returns:
        Output (..., M, C) and the attention weights (..., heads, M, N)
    """
    queries, keys_values = ops.as_node(queries), ops.as_node(keys_values)
    width = queries.shape[-1]
    if width % heads or keys_values.shape[-1] != width:
        raise ShapeError("attention", queries.shape, keys_values.shape)
    q = _split_heads(_project(queries, params, prefix, "q"), heads)
    k = _split_heads(_project(keys_values, params, prefix, "k"), heads)
    v = _split_heads(_project(keys_values, params, prefix, "v"), heads)
    scores = ops.scale(ops.matmul(q, ops.swap_last(k)), 1.0 / math.sqrt(width // heads))
    weights = ops.softmax(scores, axis=-1)
    mixed = _merge_heads(ops.matmul(weights, v))
    out = ops.add(ops.matmul(mixed, params[f"{prefix}.Wo"]), params[f"{prefix}.bo"])
    return out, weights.value


def self_attention_block(x, params: Params, prefix: str, heads: int) -> Node:
    """Pre-norm block: x + MHSA(LN(x)), then + FF(LN(.))."""
    normed = ops.layer_norm(x, params[f"{prefix}.ln1.g"], params[f"{prefix}.ln1.b"])
    attended, _ = attention(normed, normed, params, f"{prefix}.attn", heads)
    x = ops.add(x, attended)
    normed = ops.layer_norm(x, params[f"{prefix}.ln2.g"], params[f"{prefix}.ln2.b"])
    return ops.add(x, feed_forward(normed, params, f"{prefix}.ff"))


def cross_attention_block(queries, memory, params: Params, prefix: str, heads: int) -> Node:
    """Pre-norm block: queries attend over ``memory``, then a feed-forward."""
    normed = ops.layer_norm(queries, params[f"{prefix}.ln1.g"], params[f"{prefix}.ln1.b"])
    attended, _ = attention(normed, memory, params, f"{prefix}.attn", heads)
    queries = ops.add(queries, attended)
    normed = ops.layer_norm(queries, params[f"{prefix}.ln2.g"], params[f"{prefix}.ln2.b"])
    return ops.add(queries, feed_forward(normed, params, f"{prefix}.ff"))


def init_dense(rng: np.random.Generator, fan_in: int, fan_out: int, gain: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    return rng.normal(0.0, gain / math.sqrt(fan_in), size=(fan_in, fan_out)), np.zeros(fan_out)


def init_attention(rng: np.random.Generator, prefix: str, width: int) -> dict:
    out = {}
    for which in ("q", "k", "v", "o"):
        w, b = init_dense(rng, width, width)
        out[f"{prefix}.W{which}"] = w
        out[f"{prefix}.b{which}"] = b
    return out


def init_feed_forward(rng: np.random.Generator, prefix: str, width: int, hidden: int) -> dict:
    w1, b1 = init_dense(rng, width, hidden)
    w2, b2 = init_dense(rng, hidden, width)
    return {f"{prefix}.W1": w1, f"{prefix}.b1": b1, f"{prefix}.W2": w2, f"{prefix}.b2": b2}


def init_block(rng: np.random.Generator, prefix: str, width: int, hidden: int) -> dict:
    out = init_attention(rng, f"{prefix}.attn", width)
    out.update(init_feed_forward(rng, f"{prefix}.ff", width, hidden))
    for ln in ("ln1", "ln2"):
        out[f"{prefix}.{ln}.g"] = np.ones(width)
        out[f"{prefix}.{ln}.b"] = np.zeros(width)
    return out


def bind(arrays: Mapping[str, np.ndarray], trainable: Optional[set] = None) -> dict:
    """Wrap arrays as Nodes; names in ``trainable`` become trainable leaves."""
    trainable = trainable or set()
    return {
        name: Node.param(value, name=name) if name in trainable else Node.constant(value, name=name)
        for name, value in arrays.items()
    }
