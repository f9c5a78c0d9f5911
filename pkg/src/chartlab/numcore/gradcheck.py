"""Central finite-difference validation of reverse-mode gradients."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, backward


def finite_diff_check(fn, params, h: float = 1e-5) -> float:
    """Compare analytic gradients of a scalar `fn()` against central differences.

    `fn` must be a pure function of the `params` tensors (it is re-evaluated
    with coordinates perturbed in place, then the originals are restored).
    Relative error per coordinate uses a max(1, |analytic|) denominator;
    the maximum over all coordinates of all params is returned.
    """
    params = list(params)
    loss = fn()
    grads = backward(loss, params)
    worst = 0.0
    for p in params:
        analytic = grads[p]
        flat = p.data.reshape(-1)
        ana = analytic.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = float(fn().data)
            flat[i] = orig - h
            f_minus = float(fn().data)
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * h)
            err = abs(numeric - ana[i]) / max(1.0, abs(ana[i]))
            if err > worst:
                worst = err
    return worst


def random_tensor(rng, shape, scale: float = 1.0, requires_grad: bool = True) -> Tensor:
    """Gaussian tensor drawn from a PrngStream, for randomized checks."""
    n = int(np.prod(shape)) if shape else 1
    data = rng.normal_array(n).reshape(shape) * scale
    return Tensor(data, requires_grad=requires_grad)
