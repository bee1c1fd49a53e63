"""
Reverse-mode autodiff graph node.

A Node holds a float64 value, an accumulated gradient, the tag of the op that
produced it and references to its parents. Each non-leaf node carries a
backward closure mapping the output gradient to one gradient per parent.
"""
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import ShapeError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Node:
    __slots__ = ("value", "grad", "op", "parents", "requires_grad", "name", "_backward")

    def __init__(
        self,
        value,
        parents: Tuple["Node", ...] = (),
        op: str = "leaf",
        backward: Optional[BackwardFn] = None,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.parents = tuple(parents)
        self.requires_grad = requires_grad or any(p.requires_grad for p in self.parents)
        self.name = name
        self._backward = backward

    @classmethod
    def param(cls, value, name: Optional[str] = None) -> "Node":
        """Trainable leaf."""
        return cls(value, requires_grad=True, name=name)

    @classmethod
    def constant(cls, value, name: Optional[str] = None) -> "Node":
        return cls(value, requires_grad=False, name=name)

    @classmethod
    def from_op(cls, value, parents: Sequence["Node"], op: str, backward: BackwardFn) -> "Node":
        """Node produced by an op; ``backward`` returns one gradient per parent."""
        return cls(value, parents=tuple(parents), op=op, backward=backward)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    def item(self) -> float:
        return float(self.value)

    def _topological_order(self):
        order, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        return order

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Accumulate gradients into every node this one depends on."""
        if not self.requires_grad:
            return
        seed = np.ones_like(self.value) if grad is None else np.asarray(grad, dtype=np.float64)
        self.grad = seed if self.grad is None else self.grad + seed

        for node in reversed(self._topological_order()):
            if node._backward is None or node.grad is None:
                continue
            parent_grads = node._backward(node.grad)
            for parent, g in zip(node.parents, parent_grads):
                if g is None or not parent.requires_grad:
                    continue
                if g.shape != parent.value.shape:
                    raise ShapeError(f"{node.op} backward", g.shape, parent.value.shape)
                parent.grad = g.copy() if parent.grad is None else parent.grad + g

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = self.name or self.op
        return f"Node({label}, shape={self.shape})"
