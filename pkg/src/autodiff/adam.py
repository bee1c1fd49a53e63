"""
Adam optimizer over named parameter arrays.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np


@dataclass
class AdamState:
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
    lr: float = 1e-3,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """
    One bias-corrected Adam update.

    Only names with a gradient are updated; every other array is passed
    through as the same object, so frozen parameters stay bit-identical.
    """
    beta1, beta2 = betas
    step = state.step + 1
    m, v = dict(state.m), dict(state.v)
    updated = dict(params)

    for name in sorted(grads):
        g = grads[name]
        if g is None:
            continue
        m[name] = beta1 * m.get(name, np.zeros_like(g)) + (1.0 - beta1) * g
        v[name] = beta2 * v.get(name, np.zeros_like(g)) + (1.0 - beta2) * g * g
        m_hat = m[name] / (1.0 - beta1 ** step)
        v_hat = v[name] / (1.0 - beta2 ** step)
        updated[name] = params[name] - lr * m_hat / (np.sqrt(v_hat) + eps)

    return updated, AdamState(step=step, m=m, v=v)
