"""Dense float64 tensors with taped reverse-mode differentiation.

Forward values live in numpy arrays; every differentiable primitive
records itself on the implicit graph (op name, input references, a
forward replay closure and a backward closure). `backward` topologically
orders the nodes reachable from a scalar loss and visits each exactly
once. All accumulation is in 64-bit; graph recording can be suspended
with `no_grad()` for inference passes.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


class ShapeError(ValueError):
    """Raised when primitive inputs do not conform."""


_grad_enabled = True


@contextmanager
def no_grad():
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "op", "inputs", "_backward", "_forward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.op = "leaf"
        self.inputs = ()
        self._backward = None
        self._forward = None

    @property
    def shape(self):
        return self.data.shape

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self):
        return f"Tensor(op={self.op!r}, shape={self.data.shape}, requires_grad={self.requires_grad})"


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _record(op: str, inputs, data, forward, backward) -> Tensor:
    """Build the result node; attach graph metadata only when tracking."""
    out = Tensor(data)
    if _grad_enabled and any(t.requires_grad or t._backward is not None for t in inputs):
        out.requires_grad = True
        out.op = op
        out.inputs = tuple(inputs)
        out._forward = forward
        out._backward = backward
    return out


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.requires_grad or t._backward is not None:
        t.grad = g if t.grad is None else t.grad + g


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# primitives


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        data = a.data + b.data
    except ValueError:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} do not broadcast") from None

    def backward(up):
        _accumulate(a, _unbroadcast(up, a.shape))
        _accumulate(b, _unbroadcast(up, b.shape))

    return _record("add", (a, b), data, lambda x, y: x + y, backward)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        data = a.data * b.data
    except ValueError:
        raise ShapeError(f"mul: shapes {a.shape} and {b.shape} do not broadcast") from None

    def backward(up):
        _accumulate(a, _unbroadcast(up * b.data, a.shape))
        _accumulate(b, _unbroadcast(up * a.data, b.shape))

    return _record("mul", (a, b), data, lambda x, y: x * y, backward)


def scale(a, factor: float) -> Tensor:
    a = _as_tensor(a)
    c = float(factor)

    def backward(up):
        _accumulate(a, up * c)

    return _record("scale", (a,), a.data * c, lambda x: x * c, backward)


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise ShapeError(f"matmul: needs ndim >= 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: inner dims disagree for {a.shape} @ {b.shape}")
    try:
        data = a.data @ b.data
    except ValueError:
        raise ShapeError(f"matmul: leading dims do not broadcast for {a.shape} @ {b.shape}") from None

    def backward(up):
        _accumulate(a, _unbroadcast(up @ np.swapaxes(b.data, -1, -2), a.shape))
        _accumulate(b, _unbroadcast(np.swapaxes(a.data, -1, -2) @ up, b.shape))

    return _record("matmul", (a, b), data, lambda x, y: x @ y, backward)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat: empty input list")
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise ShapeError(
            f"concat: shapes {[t.shape for t in tensors]} do not align on axis {axis}"
        ) from None
    sizes = [t.shape[axis] for t in tensors]

    def backward(up):
        offset = 0
        for t, size in zip(tensors, sizes):
            idx = [slice(None)] * up.ndim
            idx[axis] = slice(offset, offset + size)
            _accumulate(t, up[tuple(idx)])
            offset += size

    return _record("concat", tuple(tensors), data,
                   lambda *xs: np.concatenate(xs, axis=axis), backward)


def slice_axis(a, axis: int, start: int, stop: int) -> Tensor:
    a = _as_tensor(a)
    if not -a.data.ndim <= axis < a.data.ndim:
        raise ShapeError(f"slice: axis {axis} out of range for shape {a.shape}")
    idx = [slice(None)] * a.data.ndim
    idx[axis] = slice(start, stop)
    idx = tuple(idx)

    def backward(up):
        g = np.zeros_like(a.data)
        g[idx] += up
        _accumulate(a, g)

    return _record("slice", (a,), a.data[idx], lambda x: x[idx], backward)


def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)
    shape = tuple(shape)
    try:
        data = a.data.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape: cannot view {a.shape} as {shape}") from None
    src = a.shape

    def backward(up):
        _accumulate(a, up.reshape(src))

    return _record("reshape", (a,), data, lambda x: x.reshape(shape), backward)


def transpose(a, axes) -> Tensor:
    a = _as_tensor(a)
    axes = tuple(axes)
    if sorted(axes) != list(range(a.data.ndim)):
        raise ShapeError(f"transpose: axes {axes} invalid for shape {a.shape}")
    inv = tuple(np.argsort(axes))

    def backward(up):
        _accumulate(a, up.transpose(inv))

    return _record("transpose", (a,), a.data.transpose(axes),
                   lambda x: x.transpose(axes), backward)


def sum_all(a) -> Tensor:
    a = _as_tensor(a)

    def backward(up):
        _accumulate(a, np.broadcast_to(up, a.shape).copy())

    return _record("sum", (a,), np.sum(a.data), lambda x: np.sum(x), backward)


def mean_all(a) -> Tensor:
    a = _as_tensor(a)
    n = a.data.size

    def backward(up):
        _accumulate(a, np.broadcast_to(up / n, a.shape).copy())

    return _record("mean", (a,), np.mean(a.data), lambda x: np.mean(x), backward)


def softmax(a, axis: int = -1) -> Tensor:
    a = _as_tensor(a)

    def fwd(x):
        shifted = x - np.max(x, axis=axis, keepdims=True)
        e = np.exp(shifted)
        return e / np.sum(e, axis=axis, keepdims=True)

    p = fwd(a.data)

    def backward(up):
        inner = np.sum(up * p, axis=axis, keepdims=True)
        _accumulate(a, (up - inner) * p)

    return _record("softmax", (a,), p, fwd, backward)


def gelu(a) -> Tensor:
    a = _as_tensor(a)
    c = np.sqrt(2.0 / np.pi)
    k = 0.044715

    def fwd(x):
        return 0.5 * x * (1.0 + np.tanh(c * (x + k * (x * x * x))))

    x = a.data
    t = np.tanh(c * (x + k * (x * x * x)))

    def backward(up):
        du = c * (1.0 + 3.0 * k * (x * x))
        _accumulate(a, up * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du))

    return _record("gelu", (a,), 0.5 * x * (1.0 + t), fwd, backward)


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
    x, gamma, beta = _as_tensor(x), _as_tensor(gamma), _as_tensor(beta)
    d = x.shape[-1] if x.data.ndim else 0
    if gamma.shape != (d,) or beta.shape != (d,):
        raise ShapeError(
            f"layer_norm: gamma/beta shapes {gamma.shape}/{beta.shape} do not match feature dim {d}"
        )

    def fwd(xv, gv, bv):
        mu = xv.mean(axis=-1, keepdims=True)
        xc = xv - mu
        inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + eps)
        return gv * (xc * inv) + bv

    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + eps)
    xhat = xc * inv

    def backward(up):
        lead = tuple(range(up.ndim - 1))
        _accumulate(gamma, (up * xhat).sum(axis=lead))
        _accumulate(beta, up.sum(axis=lead))
        dxhat = up * gamma.data
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        _accumulate(x, inv * (dxhat - m1 - xhat * m2))

    return _record("layer_norm", (x, gamma, beta), gamma.data * xhat + beta.data, fwd, backward)


def embedding_gather(table, ids) -> Tensor:
    table = _as_tensor(table)
    ids = np.asarray(ids)
    if not np.issubdtype(ids.dtype, np.integer):
        raise ShapeError("embedding_gather: ids must be integers")
    if table.data.ndim != 2:
        raise ShapeError(f"embedding_gather: table must be 2-d, got {table.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeError(
            f"embedding_gather: id out of range for table with {table.shape[0]} rows"
        )

    def backward(up):
        g = np.zeros_like(table.data)
        np.add.at(g, ids, up)
        _accumulate(table, g)

    return _record("embedding_gather", (table,), table.data[ids],
                   lambda t: t[ids], backward)


_MASK_FILL = -1e30


def causal_mask(scores) -> Tensor:
    """Fill positions above the diagonal of the last two axes with -1e30."""
    scores = _as_tensor(scores)
    if scores.data.ndim < 2 or scores.shape[-1] != scores.shape[-2]:
        raise ShapeError(f"causal_mask: last two dims must be square, got {scores.shape}")
    n = scores.shape[-1]
    keep = np.tril(np.ones((n, n), dtype=bool))

    def fwd(x):
        return np.where(keep, x, _MASK_FILL)

    def backward(up):
        _accumulate(scores, np.where(keep, up, 0.0))

    return _record("causal_mask", (scores,), fwd(scores.data), fwd, backward)


def cross_entropy_with_logits(logits, targets) -> Tensor:
    """Per-position negative log-likelihood; shape = logits.shape[:-1]."""
    logits = _as_tensor(logits)
    targets = np.asarray(targets)
    if targets.shape != logits.shape[:-1]:
        raise ShapeError(
            f"cross_entropy_with_logits: targets {targets.shape} vs logits {logits.shape}"
        )
    if targets.size and (targets.min() < 0 or targets.max() >= logits.shape[-1]):
        raise ShapeError("cross_entropy_with_logits: target id out of range")

    def fwd(x):
        m = np.max(x, axis=-1, keepdims=True)
        lse = m + np.log(np.sum(np.exp(x - m), axis=-1, keepdims=True))
        picked = np.take_along_axis(x, targets[..., None], axis=-1)
        return (lse - picked)[..., 0]

    x = logits.data
    m = np.max(x, axis=-1, keepdims=True)
    e = np.exp(x - m)
    z = e.sum(axis=-1, keepdims=True)
    probs = e / z
    nll = (m + np.log(z) - np.take_along_axis(x, targets[..., None], axis=-1))[..., 0]

    def backward(up):
        g = probs * up[..., None]
        np.subtract.at(g, (*np.indices(targets.shape), targets), up)
        _accumulate(logits, g)

    return _record("cross_entropy_with_logits", (logits,), nll, fwd, backward)


# ---------------------------------------------------------------------------
# string dispatch, tape, backward

_PRIMITIVES = {
    "matmul": lambda inputs, attrs: matmul(*inputs),
    "add": lambda inputs, attrs: add(*inputs),
    "mul": lambda inputs, attrs: mul(*inputs),
    "scale": lambda inputs, attrs: scale(inputs[0], attrs["factor"]),
    "concat": lambda inputs, attrs: concat(inputs, axis=attrs.get("axis", 0)),
    "slice": lambda inputs, attrs: slice_axis(inputs[0], attrs["axis"], attrs["start"], attrs["stop"]),
    "softmax": lambda inputs, attrs: softmax(inputs[0], axis=attrs.get("axis", -1)),
    "layer_norm": lambda inputs, attrs: layer_norm(*inputs, eps=attrs.get("eps", 1e-5)),
    "gelu": lambda inputs, attrs: gelu(inputs[0]),
    "embedding_gather": lambda inputs, attrs: embedding_gather(inputs[0], attrs["ids"]),
    "causal_mask": lambda inputs, attrs: causal_mask(inputs[0]),
    "cross_entropy_with_logits": lambda inputs, attrs: cross_entropy_with_logits(
        inputs[0], attrs["targets"]
    ),
    "reshape": lambda inputs, attrs: reshape(inputs[0], attrs["shape"]),
    "transpose": lambda inputs, attrs: transpose(inputs[0], attrs["axes"]),
    "sum": lambda inputs, attrs: sum_all(inputs[0]),
    "mean": lambda inputs, attrs: mean_all(inputs[0]),
}


def apply_primitive(kind: str, inputs, attrs: dict | None = None) -> Tensor:
    if kind not in _PRIMITIVES:
        raise ValueError(f"unknown primitive kind {kind!r}")
    return _PRIMITIVES[kind](list(inputs), attrs or {})


class Tape:
    """Topologically ordered record of the primitives reachable from a root."""

    __slots__ = ("nodes",)

    def __init__(self, nodes):
        self.nodes = nodes

    def replay(self) -> None:
        """Recompute every non-leaf value from current input data, in order."""
        for node in self.nodes:
            if node._forward is not None:
                node.data = np.asarray(node._forward(*(t.data for t in node.inputs)),
                                       dtype=np.float64)


def build_tape(root: Tensor) -> Tape:
    """Post-order DFS over the graph below `root`; leaves excluded."""
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited or node._backward is None:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for child in node.inputs:
            stack.append((child, False))
    return Tape(order)


def backward(loss: Tensor, params=None) -> dict:
    """Reverse-mode sweep from a scalar loss.

    Returns {tensor: gradient array} for each tensor in `params`
    (non-participating entries get zeros). Leaf .grad attributes are
    populated as a side effect; intermediate grads are cleared.
    """
    if loss.data.size != 1:
        raise ValueError(f"backward: loss must be scalar, got shape {loss.shape}")
    tape = build_tape(loss)
    seen = set()
    for node in tape.nodes:
        node.grad = None
        for child in node.inputs:
            if id(child) not in seen:
                child.grad = None
                seen.add(id(child))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(tape.nodes):
        if node.grad is not None:
            node._backward(node.grad)
        node.grad = None  # free intermediate storage as we go

    if params is None:
        return {}
    out = {}
    for p in params:
        out[p] = p.grad if p.grad is not None else np.zeros_like(p.data)
    return out
