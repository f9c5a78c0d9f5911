"""Numeric core: float64 tensors, reverse-mode autodiff, AdamW, seeded PRNG."""

from .gradcheck import finite_diff_check, random_tensor
from .optim import OptimizerState, adamw_step
from .prng import PrngStream, fnv1a64, mix64
from .tensor import (
    ShapeError,
    Tape,
    Tensor,
    add,
    apply_primitive,
    backward,
    build_tape,
    causal_mask,
    concat,
    cross_entropy_with_logits,
    embedding_gather,
    gelu,
    grad_enabled,
    layer_norm,
    matmul,
    mean_all,
    mul,
    no_grad,
    reshape,
    scale,
    slice_axis,
    softmax,
    sum_all,
    transpose,
)

__all__ = [
    "PrngStream",
    "fnv1a64",
    "mix64",
    "ShapeError",
    "Tape",
    "Tensor",
    "add",
    "apply_primitive",
    "backward",
    "build_tape",
    "causal_mask",
    "concat",
    "cross_entropy_with_logits",
    "embedding_gather",
    "gelu",
    "grad_enabled",
    "layer_norm",
    "matmul",
    "mean_all",
    "mul",
    "no_grad",
    "reshape",
    "scale",
    "slice_axis",
    "softmax",
    "sum_all",
    "transpose",
    "OptimizerState",
    "adamw_step",
    "finite_diff_check",
    "random_tensor",
]
