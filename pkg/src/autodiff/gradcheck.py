"""
Central finite-difference gradient check.
"""
import math
from typing import Callable, Dict, Mapping

import numpy as np

from src.autodiff.node import Node
from src.core.exceptions import NumericError

ScalarFn = Callable[[Dict[str, Node]], Node]


def _evaluate(f: ScalarFn, params: Mapping[str, np.ndarray]) -> float:
    value = float(f({k: Node.constant(v) for k, v in params.items()}).value)
    if not math.isfinite(value):
        raise NumericError(f"function value is not finite: {value}")
    return value


def analytic_gradients(f: ScalarFn, params: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """Gradients of f at params; parameters the graph never reaches get zeros."""
    leaves = {k: Node.param(np.array(v, dtype=np.float64), name=k) for k, v in params.items()}
    out = f(leaves)
    if not np.all(np.isfinite(out.value)):
        raise NumericError("function value is not finite")
    out.backward()
    return {k: (n.grad if n.grad is not None else np.zeros_like(n.value)) for k, n in leaves.items()}


def finite_diff_check(
    f: ScalarFn,
    params: Mapping[str, np.ndarray],
    eps: float = 1e-5,
    n_coords: int = 200,
    seed: int = 0,
) -> float:
    """
    Compare analytic and central-difference gradients coordinate-wise.

    Args:
        f: Maps a dict of parameter Nodes to a scalar Node
        params: Point at which to check
        eps: Finite-difference step
        n_coords: Coordinates sampled (all of them when there are fewer)
        seed: Sampling seed

    Returns:
        Maximum relative error |a - n| / max(|a|, |n|, 1e-6)
    """
    params = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
    grads = analytic_gradients(f, params)

    coords = [(name, i) for name in sorted(params) for i in range(params[name].size)]
    if len(coords) > n_coords:
        rng = np.random.default_rng(seed)
        picks = rng.choice(len(coords), size=n_coords, replace=False)
        coords = [coords[i] for i in sorted(picks)]

    worst = 0.0
    for name, i in coords:
        original = params[name].flat[i]
        params[name].flat[i] = original + eps
        plus = _evaluate(f, params)
        params[name].flat[i] = original - eps
        minus = _evaluate(f, params)
        params[name].flat[i] = original

        numeric = (plus - minus) / (2.0 * eps)
        analytic = float(grads[name].flat[i])
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        worst = max(worst, err)
    return worst
