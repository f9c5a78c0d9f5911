"""Instruction fine-tuning loop: batching, curriculum, plateau stopping.

All randomness derives from TrainConfig.seed through named child streams
(parameter init, per-epoch shuffles, per-(record, epoch) augmentation), so
two single-threaded runs with the same corpus and config produce identical
histories and checkpoints, and augmentation does not depend on how records
are sharded across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..chartgen.render import render_chart
from ..model.network import (
    ModelConfig,
    ModelParams,
    decoder_logits,
    encoder_features,
    init_model,
)
from ..model.vocab import Vocabulary, build_vocabulary
from ..numcore import (
    OptimizerState,
    PrngStream,
    Tensor,
    adamw_step,
    backward,
    cross_entropy_with_logits,
    mul,
    no_grad,
    scale,
    sum_all,
)
from .augment import AugmentConfig, augment
from .curriculum import CurriculumSchedule, curriculum_order
from .sequences import VARIANTS, build_training_sequence, check_variant


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 2e-4
    batch_size: int = 8
    max_epochs: int = 20
    patience: int | None = 3       # evaluations without 0.5% relative gain
    min_delta: float = 0.005
    seed: int = 0
    variant: str = "full"
    stage_epochs: tuple = (2, 2, 2)
    max_steps: int | None = None   # optional hard cap on optimizer steps

    def __post_init__(self):
        check_variant(self.variant)
        if self.lr <= 0 or self.batch_size <= 0 or self.max_epochs <= 0:
            raise ValueError("lr, batch_size and max_epochs must be positive")


@dataclass(frozen=True)
class VariantSettings:
    use_reasoning: bool
    augment_config: AugmentConfig
    use_curriculum: bool


def ablation_variant(name: str, augment_config: AugmentConfig | None = None) -> VariantSettings:
    """Per-variant switches; `augment_config` overrides the default strengths
    for every variant except no_aug, which always gets the identity."""
    check_variant(name)
    base = augment_config if augment_config is not None else AugmentConfig()
    if name == "no_vcot":
        return VariantSettings(False, base, True)
    if name == "no_aug":
        return VariantSettings(True, AugmentConfig.identity(), True)
    if name == "no_curriculum":
        return VariantSettings(True, base, False)
    return VariantSettings(True, base, True)


@dataclass(frozen=True)
class HistoryRow:
    epoch: int
    train_nll: float
    val_nll: float
    stage: int


@dataclass
class FitResult:
    params: ModelParams
    history: list
    vocab: Vocabulary
    model_config: ModelConfig
    steps: int


def _pad_batch(batch):
    width = max(len(ids) for _, ids, _ in batch)
    ids = np.zeros((len(batch), width), dtype=np.int64)      # PAD id is 0
    mask = np.zeros((len(batch), width), dtype=np.float64)
    pixels = np.stack([p for p, _, _ in batch])
    for i, (_, seq, m) in enumerate(batch):
        ids[i, : len(seq)] = seq
        mask[i, : len(seq)] = m
    return pixels, ids, mask


def _masked_loss(params, pixels, ids, mask):
    feats = encoder_features(params, pixels)
    logits = decoder_logits(params, feats, ids[:, :-1])
    nll = cross_entropy_with_logits(logits, ids[:, 1:])
    tmask = mask[:, 1:]
    count = float(tmask.sum())
    if count == 0:
        raise ValueError("batch has no loss-bearing tokens")
    loss = scale(sum_all(mul(nll, Tensor(tmask))), 1.0 / count)
    return loss, count


def train_step(params, opt_state: OptimizerState, batch) -> float:
    """One forward/backward/update on a batch of (pixels, ids, mask)."""
    pixels, ids, mask = _pad_batch(batch)
    loss, _ = _masked_loss(params, pixels, ids, mask)
    value = float(loss.data)
    if not math.isfinite(value):
        raise TrainingDivergedError(
            f"non-finite loss {value} at optimizer step {opt_state.t + 1}; "
            "inspect learning rate and inputs")
    trainable = params.trainable()
    grad_map = backward(loss, trainable.values())
    grads = {name: grad_map[t] for name, t in trainable.items()}
    adamw_step(opt_state, trainable, grads)
    return value


def evaluate_nll(params, records, vocab: Vocabulary, variant: str,
                 renders: dict, batch_size: int = 8) -> float:
    """Teacher-forced per-token NLL over clean (un-augmented) images."""
    total = 0.0
    count = 0.0
    with no_grad():
        for start in range(0, len(records), batch_size):
            chunk = records[start:start + batch_size]
            batch = []
            for r in chunk:
                ids, mask = build_training_sequence(r, vocab, variant)
                batch.append((renders[r.id].pixels, ids, mask))
            pixels, ids, mask = _pad_batch(batch)
            loss, n = _masked_loss(params, pixels, ids, mask)
            total += float(loss.data) * n
            count += n
    return total / count


def render_cache(records, image_size: int) -> dict:
    return {r.id: render_chart(r.spec, image_size) for r in records}


def fit(config: TrainConfig, train_records, val_records,
        model_config: ModelConfig | None = None,
        vocab: Vocabulary | None = None,
        augment_config: AugmentConfig | None = None) -> FitResult:
    """Train until the validation NLL plateaus or max_epochs is reached.

    Returns the best-validation parameters along with the epoch history
    (epoch, train NLL, val NLL, curriculum stage).
    """
    if not train_records or not val_records:
        raise ValueError("fit needs non-empty train and validation splits")
    if vocab is None:
        vocab = build_vocabulary(list(train_records) + list(val_records))
    if model_config is None:
        model_config = ModelConfig(vocab_size=len(vocab))
    settings = ablation_variant(config.variant, augment_config)
    schedule = CurriculumSchedule(tuple(config.stage_epochs)) if settings.use_curriculum else None

    root = PrngStream(config.seed)
    params = init_model(model_config, root.child("init"))
    opt_state = OptimizerState(lr=config.lr)
    renders = render_cache(list(train_records) + list(val_records), model_config.image_size)

    history: list[HistoryRow] = []
    best_val = math.inf
    best_params = params.copy()
    stale = 0
    steps = 0
    out_of_steps = False

    for epoch in range(config.max_epochs):
        pool = curriculum_order(train_records, schedule, epoch, root.child("order", epoch))
        nll_sum = 0.0
        token_sum = 0.0
        for start in range(0, len(pool), config.batch_size):
            chunk = pool[start:start + config.batch_size]
            batch = []
            for r in chunk:
                stream = PrngStream(config.seed).child("augment", r.id, epoch)
                image = augment(renders[r.id], stream, settings.augment_config)
                ids, mask = build_training_sequence(r, vocab, config.variant)
                batch.append((image.pixels, ids, mask))
            loss = train_step(params, opt_state, batch)
            count = sum(float(m[1:].sum()) for _, _, m in batch)
            nll_sum += loss * count
            token_sum += count
            steps += 1
            if config.max_steps is not None and steps >= config.max_steps:
                out_of_steps = True
                break
        # a tiny corpus can leave an early curriculum stage empty
        train_nll = nll_sum / token_sum if token_sum else math.nan
        val_nll = evaluate_nll(params, val_records, vocab, config.variant,
                               renders, config.batch_size)
        stage = schedule.stage_for_epoch(epoch) if schedule else 2
        history.append(HistoryRow(epoch, train_nll, val_nll, stage))

        significant = val_nll < best_val * (1.0 - config.min_delta)
        if val_nll < best_val:
            best_val = val_nll
            best_params = params.copy()
        stale = 0 if significant else stale + 1
        if config.patience is not None and stale >= config.patience:
            break
        if out_of_steps:
            break
    return FitResult(best_params, history, vocab, model_config, steps)


# ---------------------------------------------------------------------------
# flat key = value config files and history tables

_CONFIG_KEYS = {
    "lr": float,
    "batch": int,
    "max_epochs": int,
    "patience": int,
    "min_delta": float,
    "seed": int,
    "variant": str,
    "stage_epochs": str,
    "max_steps": int,
    "rotation_deg_max": float,
    "scale_min": float,
    "scale_max": float,
    "translate_px_max": int,
    "gaussian_sigma": float,
    "salt_pepper_p": float,
    "apply_prob": float,
}


def parse_train_config(text: str) -> tuple[TrainConfig, AugmentConfig]:
    """Parse `key = value` lines; '#' starts a comment, unknown keys fail."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        raw[key] = _CONFIG_KEYS[key](value)

    train_kwargs = {}
    for src, dst in (("lr", "lr"), ("batch", "batch_size"), ("max_epochs", "max_epochs"),
                     ("patience", "patience"), ("min_delta", "min_delta"),
                     ("seed", "seed"), ("variant", "variant"), ("max_steps", "max_steps")):
        if src in raw:
            train_kwargs[dst] = raw[src]
    if "stage_epochs" in raw:
        train_kwargs["stage_epochs"] = tuple(int(p) for p in raw["stage_epochs"].split(","))
    aug_kwargs = {k: raw[k] for k in ("rotation_deg_max", "scale_min", "scale_max",
                                      "translate_px_max", "gaussian_sigma",
                                      "salt_pepper_p", "apply_prob") if k in raw}
    return TrainConfig(**train_kwargs), AugmentConfig(**aug_kwargs)


def render_train_config(config: TrainConfig, aug: AugmentConfig) -> str:
    lines = [
        f"lr = {config.lr}",
        f"batch = {config.batch_size}",
        f"max_epochs = {config.max_epochs}",
        f"min_delta = {config.min_delta}",
        f"seed = {config.seed}",
        f"variant = {config.variant}",
        f"stage_epochs = {','.join(str(e) for e in config.stage_epochs)}",
    ]
    if config.patience is not None:
        lines.insert(3, f"patience = {config.patience}")
    if config.max_steps is not None:
        lines.append(f"max_steps = {config.max_steps}")
    lines += [
        f"rotation_deg_max = {aug.rotation_deg_max}",
        f"scale_min = {aug.scale_min}",
        f"scale_max = {aug.scale_max}",
        f"translate_px_max = {aug.translate_px_max}",
        f"gaussian_sigma = {aug.gaussian_sigma}",
        f"salt_pepper_p = {aug.salt_pepper_p}",
        f"apply_prob = {aug.apply_prob}",
    ]
    return "\n".join(lines) + "\n"


def history_to_table(history) -> str:
    lines = ["epoch\ttrain_nll\tval_nll\tstage"]
    for row in history:
        lines.append(f"{row.epoch}\t{row.train_nll:.6f}\t{row.val_nll:.6f}\t{row.stage}")
    return "\n".join(lines) + "\n"
