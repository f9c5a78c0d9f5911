"""Low-rank adapters over frozen attention projections.

For a target weight W (d_in x d_out, used as x @ W) the adapted forward
uses W + (alpha/rank) * (B A)^T with A (rank x d_in) Gaussian-initialized
and B (d_out x rank) zero-initialized, so injection is an exact no-op until
B moves. Merging folds the delta back into a plain parameter set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numcore import PrngStream, Tensor, add, matmul, scale, transpose
from .network import INIT_STD, ModelParams

_PROJECTION_SUFFIXES = ("wq", "wk", "wv", "wo")


class LoraError(ValueError):
    pass


@dataclass
class LoraAdapter:
    a: Tensor  # (rank, d_in)
    b: Tensor  # (d_out, rank)
    rank: int
    alpha: float

    @property
    def scaling(self) -> float:
        return self.alpha / self.rank


class LoraParams:
    """Frozen base model + trainable adapters; drop-in for ModelParams."""

    def __init__(self, base: ModelParams, adapters: dict):
        self.base = base
        self.adapters = adapters

    @property
    def config(self):
        return self.base.config

    @property
    def tensors(self):
        return self.base.tensors

    def weight(self, name: str) -> Tensor:
        w = self.base.tensors[name]
        ad = self.adapters.get(name)
        if ad is None:
            return w
        delta = transpose(matmul(ad.b, ad.a), (1, 0))
        return add(w, scale(delta, ad.scaling))

    def trainable(self) -> dict:
        out = {}
        for name, ad in self.adapters.items():
            out[f"{name}.lora_a"] = ad.a
            out[f"{name}.lora_b"] = ad.b
        return out

    def trainable_count(self) -> int:
        return sum(t.data.size for t in self.trainable().values())

    def param_count(self) -> int:
        return self.base.param_count()


def lora_inject(params: ModelParams, targets, rank: int, rng: PrngStream,
                alpha: float | None = None) -> LoraParams:
    """Freeze the base model and attach rank-r adapters to `targets`.

    Targets must name existing attention projection matrices. alpha
    defaults to rank, making the scaling 1.
    """
    if rank < 1:
        raise LoraError(f"rank must be >= 1, got {rank}")
    if isinstance(params, LoraParams):
        raise LoraError("model already carries adapters; merge before re-injecting")
    targets = list(targets)
    if not targets:
        raise LoraError("no adaptation targets given")
    frozen = params.copy()
    for t in frozen.tensors.values():
        t.requires_grad = False
    adapters = {}
    for name in targets:
        if name not in frozen.tensors:
            raise LoraError(f"unknown adaptation target {name!r}")
        if name.rsplit(".", 1)[-1] not in _PROJECTION_SUFFIXES:
            raise LoraError(f"target {name!r} is not an attention projection matrix")
        d_in, d_out = frozen.tensors[name].shape
        a = Tensor(rng.normal_array(rank * d_in).reshape(rank, d_in) * INIT_STD,
                   requires_grad=True)
        b = Tensor(np.zeros((d_out, rank)), requires_grad=True)
        adapters[name] = LoraAdapter(a, b, rank, float(alpha if alpha is not None else rank))
    return LoraParams(frozen, adapters)


def lora_merge(adapted: LoraParams) -> ModelParams:
    """Fold adapter deltas into the base weights; result has no adapters."""
    if not isinstance(adapted, LoraParams):
        return adapted  # merging twice is the identity
    merged = adapted.base.copy()
    for name, ad in adapted.adapters.items():
        delta = (ad.b.data @ ad.a.data).T * ad.scaling
        merged.tensors[name].data = merged.tensors[name].data + delta
    for t in merged.tensors.values():
        t.requires_grad = True
    return merged


def expected_trainable_count(targets_shapes, rank: int) -> int:
    """Closed form: sum over targets of rank * (d_in + d_out)."""
    return sum(rank * (d_in + d_out) for d_in, d_out in targets_shapes)
