"""
Differentiable primitives over Node.

Every op accepts Nodes or array-likes (wrapped as constants), checks shapes up
front and returns a new Node whose backward closure yields exact analytic
gradients for its parents.
"""
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.autodiff.node import Node
from src.core.exceptions import ArityError, ShapeError

Operand = Union[Node, np.ndarray, float]

_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_K = 0.044715


def as_node(x: Operand) -> Node:
    return x if isinstance(x, Node) else Node.constant(x)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, *shapes) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(*shapes)
    except ValueError as e:
        raise ShapeError(op, *shapes) from e


def _swap_last(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2)


def matmul(a: Operand, b: Operand) -> Node:
    """Batched matrix product over the last two axes, leading axes broadcast."""
    a, b = as_node(a), as_node(b)
    if a.value.ndim < 2 or b.value.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    _broadcast_shape("matmul", a.shape[:-2], b.shape[:-2])
    av, bv = a.value, b.value

    def backward(g):
        ga = _unbroadcast(np.matmul(g, _swap_last(bv)), av.shape) if a.requires_grad else None
        gb = _unbroadcast(np.matmul(_swap_last(av), g), bv.shape) if b.requires_grad else None
        return ga, gb

    return Node.from_op(np.matmul(av, bv), (a, b), "matmul", backward)


def add(a: Operand, b: Operand) -> Node:
    a, b = as_node(a), as_node(b)
    _broadcast_shape("add", a.shape, b.shape)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Node.from_op(a.value + b.value, (a, b), "add", backward)


def sub(a: Operand, b: Operand) -> Node:
    a, b = as_node(a), as_node(b)
    _broadcast_shape("sub", a.shape, b.shape)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Node.from_op(a.value - b.value, (a, b), "sub", backward)


def scale(a: Operand, factor: float) -> Node:
    a = as_node(a)
    return Node.from_op(a.value * factor, (a,), "scale", lambda g: (g * factor,))


def gelu(x: Operand) -> Node:
    """tanh-approximated GELU."""
    x = as_node(x)
    v = x.value
    t = np.tanh(_GELU_C * (v + _GELU_K * v ** 3))

    def backward(g):
        dt = (1.0 - t * t) * _GELU_C * (1.0 + 3.0 * _GELU_K * v * v)
        return (g * (0.5 * (1.0 + t) + 0.5 * v * dt),)

    return Node.from_op(0.5 * v * (1.0 + t), (x,), "gelu", backward)


def softmax(x: Operand, axis: int = -1) -> Node:
    x = as_node(x)
    shifted = x.value - x.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return Node.from_op(y, (x,), "softmax", backward)


def layer_norm(x: Operand, gamma: Operand, beta: Operand, eps: float = 1e-5) -> Node:
    """Normalize over the last axis, then scale and shift."""
    x, gamma, beta = as_node(x), as_node(gamma), as_node(beta)
    width = x.shape[-1]
    if gamma.shape != (width,) or beta.shape != (width,):
        raise ShapeError("layer_norm", x.shape, gamma.shape, beta.shape)
    mu = x.value.mean(axis=-1, keepdims=True)
    centered = x.value - mu
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv_std

    def backward(g):
        gxhat = g * gamma.value
        gx = inv_std * (
            gxhat - gxhat.mean(axis=-1, keepdims=True) - xhat * (gxhat * xhat).mean(axis=-1, keepdims=True)
        )
        lead = tuple(range(g.ndim - 1))
        return gx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return Node.from_op(xhat * gamma.value + beta.value, (x, gamma, beta), "layer_norm", backward)


def mean_pool(x: Operand, axis: int = -2) -> Node:
    """Mean over one axis (the token axis by default)."""
    x = as_node(x)
    n = x.shape[axis]

    def backward(g):
        return (np.broadcast_to(np.expand_dims(g, axis) / n, x.shape).copy(),)

    return Node.from_op(x.value.mean(axis=axis), (x,), "mean_pool", backward)


def _row_weights(n: int, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] != n:
        raise ShapeError("loss weights", (n,), w.shape)
    return w


def cross_entropy(logits: Operand, targets, weights: Optional[np.ndarray] = None) -> Node:
    """
    Weighted mean negative log-likelihood over rows.

    Args:
        logits: (N, K) scores
        targets: (N,) integer class indices
        weights: optional (N,) row weights; rows with weight 0 are masked

    Returns:
        Scalar node; 0 when every row is masked
    """
    logits = as_node(logits)
    targets = np.asarray(targets, dtype=np.int64).reshape(-1)
    if logits.value.ndim != 2 or logits.shape[0] != targets.shape[0]:
        raise ShapeError("cross_entropy", logits.shape, targets.shape)
    if targets.size and (targets.min() < 0 or targets.max() >= logits.shape[1]):
        raise ShapeError("cross_entropy targets", logits.shape, targets.shape)
    n = logits.shape[0]
    w = _row_weights(n, weights)
    total = w.sum()
    shifted = logits.value - logits.value.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(n)
    if total <= 0:
        return Node.from_op(0.0, (logits,), "cross_entropy", lambda g: (np.zeros_like(logits.value),))
    loss = -(w * log_probs[rows, targets]).sum() / total

    def backward(g):
        grad = np.exp(log_probs)
        grad[rows, targets] -= 1.0
        return (grad * (w / total)[:, None] * g,)

    return Node.from_op(loss, (logits,), "cross_entropy", backward)


def mse(pred: Operand, target, weights: Optional[np.ndarray] = None) -> Node:
    """
    Mean squared error. With ``weights`` (one per leading row) the per-row
    squared error is averaged with those weights; all-zero weights give 0.
    """
    pred = as_node(pred)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError("mse", pred.shape, target.shape)
    diff = pred.value - target
    if weights is None:
        n = diff.size

        def backward(g):
            return (2.0 * diff / n * g,)

        return Node.from_op((diff ** 2).sum() / n, (pred,), "mse", backward)

    w = _row_weights(pred.shape[0], weights)
    per_row = diff[0].size if diff.ndim > 1 else 1
    total = w.sum() * per_row
    if total <= 0:
        return Node.from_op(0.0, (pred,), "mse", lambda g: (np.zeros_like(pred.value),))
    wb = w.reshape((-1,) + (1,) * (diff.ndim - 1))

    def backward_weighted(g):
        return (2.0 * diff * wb / total * g,)

    return Node.from_op((wb * diff ** 2).sum() / total, (pred,), "mse", backward_weighted)


def concat(nodes: Sequence[Operand], axis: int = 0) -> Node:
    nodes = [as_node(n) for n in nodes]
    if not nodes:
        raise ArityError("concat needs at least one operand")
    ndim = nodes[0].value.ndim
    ax = axis % ndim
    for n in nodes[1:]:
        if n.value.ndim != ndim or n.shape[:ax] + n.shape[ax + 1:] != nodes[0].shape[:ax] + nodes[0].shape[ax + 1:]:
            raise ShapeError("concat", nodes[0].shape, n.shape)
    splits = np.cumsum([n.shape[ax] for n in nodes])[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=ax))

    return Node.from_op(np.concatenate([n.value for n in nodes], axis=ax), nodes, "concat", backward)


def transpose(x: Operand, axes: Sequence[int]) -> Node:
    x = as_node(x)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return Node.from_op(np.transpose(x.value, axes), (x,), "transpose", lambda g: (np.transpose(g, inverse),))


def swap_last(x: Operand) -> Node:
    x = as_node(x)
    nd = x.value.ndim
    return transpose(x, tuple(range(nd - 2)) + (nd - 1, nd - 2))


def reshape(x: Operand, shape: Sequence[int]) -> Node:
    x = as_node(x)
    try:
        value = x.value.reshape(tuple(shape))
    except ValueError as e:
        raise ShapeError("reshape", x.shape, tuple(shape)) from e
    return Node.from_op(value, (x,), "reshape", lambda g: (g.reshape(x.shape),))


def broadcast_to(x: Operand, shape: Sequence[int]) -> Node:
    x = as_node(x)
    shape = tuple(shape)
    if _broadcast_shape("broadcast_to", x.shape, shape) != shape:
        raise ShapeError("broadcast_to", x.shape, shape)
    return Node.from_op(np.broadcast_to(x.value, shape).copy(), (x,), "broadcast_to", lambda g: (_unbroadcast(g, x.shape),))


def take_rows(table: Operand, indices) -> Node:
    """Gather rows of a table along axis 0 (embedding lookup)."""
    table = as_node(table)
    idx = np.asarray(indices, dtype=np.int64)

    def backward(g):
        grad = np.zeros_like(table.value)
        np.add.at(grad, idx, g)
        return (grad,)

    return Node.from_op(table.value[idx], (table,), "take_rows", backward)


def permute_rows(x: Operand, order: np.ndarray) -> Node:
    """
    Reorder rows (axis -2) of every slice of ``x``.

    ``order`` has shape ``x.shape[:-1]`` and holds one permutation per slice.
    """
    x = as_node(x)
    order = np.asarray(order, dtype=np.int64)
    if order.shape != x.shape[:-1]:
        raise ShapeError("permute_rows", x.shape, order.shape)
    idx = np.broadcast_to(order[..., None], x.shape)

    def backward(g):
        grad = np.zeros_like(x.value)
        np.put_along_axis(grad, idx, g, axis=-2)
        return (grad,)

    return Node.from_op(np.take_along_axis(x.value, idx, axis=-2), (x,), "permute_rows", backward)


def weighted_sum(terms: Sequence[Tuple[float, Node]]) -> Node:
    """sum_i w_i * term_i for scalar loss terms."""
    if not terms:
        raise ArityError("weighted_sum needs at least one term")
    total = scale(terms[0][1], terms[0][0])
    for weight, term in terms[1:]:
        total = add(total, scale(term, weight))
    return total
