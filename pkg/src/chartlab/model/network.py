"""Image-conditioned autoregressive text model.

A patch-embedding transformer encoder turns the chart image into a feature
map; a causal transformer decoder with cross-attention over those features
scores and generates token sequences. Generation runs in two stages:
reasoning tokens are decoded first (between the reasoning markers), then
the summary continues conditioned on image and reasoning. Pre-layer-norm
blocks throughout; all math is float64 through the numcore graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..numcore import (
    PrngStream,
    Tensor,
    add,
    causal_mask,
    cross_entropy_with_logits,
    embedding_gather,
    gelu,
    layer_norm,
    matmul,
    no_grad,
    reshape,
    scale,
    slice_axis,
    softmax,
    transpose,
)
from .vocab import BOS, REASON_CLOSE, REASON_OPEN, SUMMARY_CLOSE, SUMMARY_OPEN, EOS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    enc_layers: int = 2
    dec_layers: int = 2
    patch: int = 8
    ff_mult: int = 4
    image_size: int = 64
    max_seq: int = 192

    def __post_init__(self):
        if min(self.vocab_size, self.d_model, self.n_heads, self.enc_layers,
               self.dec_layers, self.patch, self.ff_mult, self.image_size,
               self.max_seq) <= 0:
            raise ConfigError("all model dimensions must be positive")
        if self.d_model % self.n_heads:
            raise ConfigError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.image_size % self.patch:
            raise ConfigError(
                f"image_size {self.image_size} not divisible by patch {self.patch}")

    @property
    def num_patches(self) -> int:
        return (self.image_size // self.patch) ** 2


@dataclass(frozen=True)
class GenerationConfig:
    use_reasoning: bool = True
    reasoning_cap: int = 64
    summary_cap: int = 96


class ModelParams:
    """Named parameter tensors plus their config; iteration order is fixed."""

    def __init__(self, config: ModelConfig, tensors: dict):
        self.config = config
        self.tensors = tensors

    def weight(self, name: str) -> Tensor:
        return self.tensors[name]

    def trainable(self) -> dict:
        return {n: t for n, t in self.tensors.items() if t.requires_grad}

    def copy(self) -> "ModelParams":
        out = {}
        for name, t in self.tensors.items():
            c = Tensor(t.data.copy(), requires_grad=t.requires_grad)
            out[name] = c
        return ModelParams(self.config, out)

    def param_count(self) -> int:
        return sum(t.data.size for t in self.tensors.values())


def _attn_param_names(prefix: str):
    for w in ("wq", "wk", "wv", "wo"):
        yield f"{prefix}.{w}", "weight"
    for b in ("bq", "bk", "bv", "bo"):
        yield f"{prefix}.{b}", "bias"


def parameter_shapes(config: ModelConfig) -> dict:
    """Name -> shape for every parameter, in creation order."""
    d, f = config.d_model, config.d_model * config.ff_mult
    p2 = config.patch * config.patch
    shapes: dict = {}

    def ln(prefix):
        shapes[f"{prefix}.g"] = (d,)
        shapes[f"{prefix}.b"] = (d,)

    def attn(prefix):
        for name, kind in _attn_param_names(prefix):
            shapes[name] = (d, d) if kind == "weight" else (d,)

    def ff(prefix):
        shapes[f"{prefix}.w1"] = (d, f)
        shapes[f"{prefix}.b1"] = (f,)
        shapes[f"{prefix}.w2"] = (f, d)
        shapes[f"{prefix}.b2"] = (d,)

    shapes["enc.patch.w"] = (p2, d)
    shapes["enc.patch.b"] = (d,)
    shapes["enc.pos"] = (config.num_patches, d)
    for i in range(config.enc_layers):
        ln(f"enc.blocks.{i}.ln1")
        attn(f"enc.blocks.{i}.attn")
        ln(f"enc.blocks.{i}.ln2")
        ff(f"enc.blocks.{i}.ff")
    ln("enc.lnf")
    shapes["dec.tok"] = (config.vocab_size, d)
    shapes["dec.pos"] = (config.max_seq, d)
    for i in range(config.dec_layers):
        ln(f"dec.blocks.{i}.ln1")
        attn(f"dec.blocks.{i}.self")
        ln(f"dec.blocks.{i}.ln2")
        attn(f"dec.blocks.{i}.cross")
        ln(f"dec.blocks.{i}.ln3")
        ff(f"dec.blocks.{i}.ff")
    ln("dec.lnf")
    shapes["dec.out.w"] = (d, config.vocab_size)
    shapes["dec.out.b"] = (config.vocab_size,)
    return shapes


INIT_STD = 0.02


def init_model(config: ModelConfig, rng: PrngStream) -> ModelParams:
    """Gaussian(0, 0.02) weights, zero biases, unit layer-norm gains."""
    tensors = {}
    for name, shape in parameter_shapes(config).items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("b", "b1", "b2", "bq", "bk", "bv", "bo"):
            data = np.zeros(shape)
        elif leaf == "g":
            data = np.ones(shape)
        else:
            data = rng.normal_array(int(np.prod(shape))).reshape(shape) * INIT_STD
        tensors[name] = Tensor(data, requires_grad=True)
    return ModelParams(config, tensors)


def attention_projection_names(config: ModelConfig) -> list[str]:
    return [name for name, shape in parameter_shapes(config).items()
            if len(shape) == 2 and name.rsplit(".", 1)[-1] in ("wq", "wk", "wv", "wo")]


# ---------------------------------------------------------------------------
# forward passes (work on 2-d (T, d) or batched 3-d (B, T, d) activations)


def _split_heads(x: Tensor, heads: int) -> Tensor:
    *lead, t, d = x.shape
    dh = d // heads
    x = reshape(x, (*lead, t, heads, dh))
    perm = (*range(len(lead)), len(lead) + 1, len(lead), len(lead) + 2)
    return transpose(x, perm)


def _merge_heads(x: Tensor) -> Tensor:
    *lead, h, t, dh = x.shape
    perm = (*range(len(lead)), len(lead) + 1, len(lead), len(lead) + 2)
    return reshape(transpose(x, perm), (*lead, t, h * dh))


def _swap_last(x: Tensor) -> Tensor:
    n = len(x.shape)
    return transpose(x, (*range(n - 2), n - 1, n - 2))


def _project(p, prefix: str, which: str, x: Tensor) -> Tensor:
    return add(matmul(x, p.weight(f"{prefix}.w{which}")), p.weight(f"{prefix}.b{which}"))


def _attention(p, prefix: str, x_q: Tensor, x_kv: Tensor, heads: int, causal: bool) -> Tensor:
    dh = x_q.shape[-1] // heads
    q = _split_heads(_project(p, prefix, "q", x_q), heads)
    k = _split_heads(_project(p, prefix, "k", x_kv), heads)
    v = _split_heads(_project(p, prefix, "v", x_kv), heads)
    scores = scale(matmul(q, _swap_last(k)), 1.0 / math.sqrt(dh))
    if causal:
        scores = causal_mask(scores)
    out = _merge_heads(matmul(softmax(scores, axis=-1), v))
    return add(matmul(out, p.weight(f"{prefix}.wo")), p.weight(f"{prefix}.bo"))


def _feed_forward(p, prefix: str, x: Tensor) -> Tensor:
    h = gelu(add(matmul(x, p.weight(f"{prefix}.w1")), p.weight(f"{prefix}.b1")))
    return add(matmul(h, p.weight(f"{prefix}.w2")), p.weight(f"{prefix}.b2"))


def _ln(p, prefix: str, x: Tensor) -> Tensor:
    return layer_norm(x, p.weight(f"{prefix}.g"), p.weight(f"{prefix}.b"))


def image_to_patches(pixels: np.ndarray, config: ModelConfig) -> np.ndarray:
    """(H, W) or (B, H, W) pixels -> (..., num_patches, patch*patch) rows."""
    arr = np.asarray(pixels, dtype=np.float64)
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[None]
    b, hgt, wid = arr.shape
    p = config.patch
    if hgt % p or wid % p:
        raise ConfigError(f"image {hgt}x{wid} not divisible by patch size {p}")
    arr = arr.reshape(b, hgt // p, p, wid // p, p)
    arr = arr.transpose(0, 1, 3, 2, 4).reshape(b, (hgt // p) * (wid // p), p * p)
    return arr[0] if squeeze else arr


def encoder_features(p: ModelParams, pixels: np.ndarray) -> Tensor:
    """Feature map over image patches; accepts (H, W) or (B, H, W) pixels."""
    cfg = p.config
    patches = image_to_patches(pixels, cfg)
    x = add(matmul(Tensor(patches), p.weight("enc.patch.w")), p.weight("enc.patch.b"))
    x = add(x, p.weight("enc.pos"))
    for i in range(cfg.enc_layers):
        pre = f"enc.blocks.{i}"
        h = _ln(p, f"{pre}.ln1", x)
        x = add(x, _attention(p, f"{pre}.attn", h, h, cfg.n_heads, causal=False))
        x = add(x, _feed_forward(p, f"{pre}.ff", _ln(p, f"{pre}.ln2", x)))
    return _ln(p, "enc.lnf", x)


def decoder_logits(p: ModelParams, feats: Tensor, token_ids: np.ndarray) -> Tensor:
    """Next-token logits at every position of `token_ids`."""
    cfg = p.config
    ids = np.asarray(token_ids)
    t = ids.shape[-1]
    if t > cfg.max_seq:
        raise ConfigError(f"sequence length {t} exceeds max_seq {cfg.max_seq}")
    if ids.size and (ids.min() < 0 or ids.max() >= cfg.vocab_size):
        raise ValueError(f"token id outside vocabulary of size {cfg.vocab_size}")
    x = embedding_gather(p.weight("dec.tok"), ids)
    x = add(x, slice_axis(p.weight("dec.pos"), 0, 0, t))
    for i in range(cfg.dec_layers):
        pre = f"dec.blocks.{i}"
        h = _ln(p, f"{pre}.ln1", x)
        x = add(x, _attention(p, f"{pre}.self", h, h, cfg.n_heads, causal=True))
        h = _ln(p, f"{pre}.ln2", x)
        x = add(x, _attention(p, f"{pre}.cross", h, feats, cfg.n_heads, causal=False))
        x = add(x, _feed_forward(p, f"{pre}.ff", _ln(p, f"{pre}.ln3", x)))
    x = _ln(p, "dec.lnf", x)
    return add(matmul(x, p.weight("dec.out.w")), p.weight("dec.out.b"))


def encode_image(p: ModelParams, image) -> np.ndarray:
    """Public feature map: (num_patches, d_model) array for one chart."""
    pixels = image.pixels if hasattr(image, "pixels") else image
    with no_grad():
        return encoder_features(p, pixels).data


@dataclass(frozen=True)
class SequenceScore:
    per_token: np.ndarray              # log P(token_i | image, tokens_<i), i >= 1
    reasoning_log_prob: float          # sum over the reasoning segment
    summary_log_prob: float            # sum over the summary segment
    joint_log_prob: float              # sum over both segments
    total_log_prob: float              # sum over all scored positions

    @property
    def factorization_gap(self) -> float:
        return abs(self.reasoning_log_prob + self.summary_log_prob - self.joint_log_prob)


def segment_bounds(token_ids) -> tuple[int, int]:
    """(reasoning start, summary start) marker positions in a sequence.

    The reasoning segment spans [reason_start, summary_start) and includes
    its markers; sequences without reasoning markers yield
    reason_start == summary_start.
    """
    ids = list(token_ids)
    summary_start = ids.index(SUMMARY_OPEN)
    reason_start = ids.index(REASON_OPEN) if REASON_OPEN in ids else summary_start
    return reason_start, summary_start


def sequence_log_prob(p: ModelParams, image, token_ids, bounds=None) -> SequenceScore:
    """Teacher-forced per-token log-probabilities and segment subtotals."""
    pixels = image.pixels if hasattr(image, "pixels") else image
    ids = np.asarray(token_ids)
    if bounds is None:
        bounds = segment_bounds(ids)
    reason_start, summary_start = bounds
    with no_grad():
        feats = encoder_features(p, pixels)
        logits = decoder_logits(p, feats, ids[:-1])
        nll = cross_entropy_with_logits(logits, ids[1:])
    per_token = -nll.data
    # per_token[i-1] scores token i; segment sums include each segment's markers
    reasoning_lp = float(per_token[max(reason_start - 1, 0):summary_start - 1].sum())
    summary_lp = float(per_token[summary_start - 1:].sum())
    joint_lp = float(per_token[max(reason_start - 1, 0):].sum())
    return SequenceScore(per_token, reasoning_lp, summary_lp, joint_lp,
                         float(per_token.sum()))


def generate_vcot(p: ModelParams, image, instruction_ids,
                  gen: GenerationConfig = GenerationConfig()) -> tuple[list[int], list[int]]:
    """Two-stage greedy decode: reasoning tokens, then summary tokens.

    Returns the two segments without their marker tokens. Caps guarantee
    termination; with use_reasoning=False the first segment is empty and
    the model decodes the summary directly.
    """
    pixels = image.pixels if hasattr(image, "pixels") else image
    with no_grad():
        feats = encoder_features(p, pixels)
        prefix = [BOS] + list(instruction_ids)
        reasoning: list[int] = []
        if gen.use_reasoning:
            prefix.append(REASON_OPEN)
            for _ in range(gen.reasoning_cap):
                nxt = _greedy_next(p, feats, prefix)
                if nxt == REASON_CLOSE:
                    break
                reasoning.append(nxt)
                prefix.append(nxt)
            prefix.append(REASON_CLOSE)  # emitted marker is never in prefix yet
        prefix.append(SUMMARY_OPEN)
        summary: list[int] = []
        for _ in range(gen.summary_cap):
            nxt = _greedy_next(p, feats, prefix)
            if nxt in (SUMMARY_CLOSE, EOS):
                break
            summary.append(nxt)
            prefix.append(nxt)
    return reasoning, summary


def _greedy_next(p: ModelParams, feats: Tensor, prefix: list[int]) -> int:
    logits = decoder_logits(p, feats, np.asarray(prefix))
    return int(np.argmax(logits.data[-1]))
