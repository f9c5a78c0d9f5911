"""AdamW with decoupled weight decay.

Update per step t (bias-corrected moments m_hat, v_hat):

    theta <- theta - lr * wd * theta                  # decay, separate
    m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import ShapeError, Tensor


@dataclass
class OptimizerState:
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adamw_step(state: OptimizerState, params: dict, grads: dict) -> None:
    """One optimizer step over {name: Tensor} params and {name: ndarray} grads.

    Parameter data is updated in place; moment buffers are keyed by name and
    created lazily on first sight.
    """
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.data.shape:
            raise ShapeError(f"adamw_step: grad shape {g.shape} != param {name} shape {p.data.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        if state.weight_decay != 0.0:
            p.data -= state.lr * state.weight_decay * p.data
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p.data -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
