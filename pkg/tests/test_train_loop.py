import numpy as np
import pytest

from chartlab.chartgen import build_corpus, render_chart
from chartlab.model import ModelConfig, build_vocabulary, init_model
from chartlab.numcore import (
    OptimizerState,
    PrngStream,
    Tensor,
    backward,
    cross_entropy_with_logits,
    mul,
    scale,
    sum_all,
)
from chartlab.train import (
    AugmentConfig,
    TrainConfig,
    TrainingDivergedError,
    ablation_variant,
    build_training_sequence,
    fit,
    history_to_table,
    parse_train_config,
    render_train_config,
    train_step,
)

TINY = dict(d_model=32, n_heads=2, enc_layers=1, dec_layers=1, patch=16,
            image_size=64, max_seq=160)


def make_batch(records, vocab, variant="full"):
    batch = []
    for r in records:
        img = render_chart(r.spec, 64)
        ids, mask = build_training_sequence(r, vocab, variant)
        batch.append((img.pixels, ids, mask))
    return batch


def test_loss_finite_positive_on_random_init():
    records = build_corpus(4, seed=1)
    vocab = build_vocabulary(records)
    params = init_model(ModelConfig(vocab_size=len(vocab), **TINY), PrngStream(0))
    loss = train_step(params, OptimizerState(lr=2e-4), make_batch(records, vocab))
    assert np.isfinite(loss)
    assert loss > 0


def test_repeated_steps_decrease_loss():
    records = build_corpus(4, seed=2)
    vocab = build_vocabulary(records)
    params = init_model(ModelConfig(vocab_size=len(vocab), **TINY), PrngStream(0))
    opt = OptimizerState(lr=2e-4)
    batch = make_batch(records, vocab)
    losses = [train_step(params, opt, batch) for _ in range(50)]
    decreases = sum(1 for a, b in zip(losses, losses[1:]) if b < a)
    assert decreases >= 0.9 * (len(losses) - 1)
    assert losses[-1] < losses[0]


def test_nan_input_aborts_with_diagnostic():
    records = build_corpus(2, seed=3)
    vocab = build_vocabulary(records)
    params = init_model(ModelConfig(vocab_size=len(vocab), **TINY), PrngStream(0))
    batch = make_batch(records, vocab)
    poisoned = [(np.full_like(p, np.nan), i, m) for p, i, m in batch]
    with pytest.raises(TrainingDivergedError, match="non-finite"):
        train_step(params, OptimizerState(), poisoned)


def test_masked_prefix_positions_get_zero_logit_gradient():
    records = build_corpus(3, seed=4)
    vocab = build_vocabulary(records)
    seqs = [build_training_sequence(r, vocab) for r in records]
    width = max(len(ids) for ids, _ in seqs)
    ids = np.zeros((len(seqs), width), dtype=np.int64)
    mask = np.zeros((len(seqs), width))
    for i, (s, m) in enumerate(seqs):
        ids[i, : len(s)] = s
        mask[i, : len(s)] = m
    logits = Tensor(PrngStream(5).normal_array((len(seqs)) * (width - 1) * len(vocab))
                    .reshape(len(seqs), width - 1, len(vocab)), requires_grad=True)
    nll = cross_entropy_with_logits(logits, ids[:, 1:])
    tmask = mask[:, 1:]
    loss = scale(sum_all(mul(nll, Tensor(tmask))), 1.0 / tmask.sum())
    grads = backward(loss, [logits])
    g = grads[logits]
    assert np.all(g[tmask == 0] == 0.0)
    assert np.any(g[tmask == 1] != 0.0)


def test_fit_deterministic_and_bounded():
    records = build_corpus(16, seed=7)
    cfg = TrainConfig(max_epochs=3, patience=None, seed=11, stage_epochs=(1, 1, 1))
    a = fit(cfg, records[:12], records[12:])
    b = fit(cfg, records[:12], records[12:])
    assert len(a.history) <= cfg.max_epochs
    assert [r.__dict__ for r in a.history] == [r.__dict__ for r in b.history]
    for name in a.params.tensors:
        assert np.array_equal(a.params.tensors[name].data, b.params.tensors[name].data)


def test_fit_plateau_stops_early():
    records = build_corpus(14, seed=8)
    cfg = TrainConfig(max_epochs=10, patience=1, min_delta=0.99, seed=1,
                      stage_epochs=(1, 1, 1))
    result = fit(cfg, records[:10], records[10:])
    assert len(result.history) < 10


def test_fit_max_steps_cap():
    records = build_corpus(12, seed=9)
    cfg = TrainConfig(max_epochs=50, patience=None, seed=1, batch_size=4,
                      max_steps=5, stage_epochs=(1, 1, 1))
    result = fit(cfg, records[:9], records[9:])
    assert result.steps == 5


def test_fit_rejects_empty_split():
    records = build_corpus(4, seed=10)
    with pytest.raises(ValueError, match="split"):
        fit(TrainConfig(), records, [])


def test_ablation_variant_settings():
    full = ablation_variant("full")
    assert full.use_reasoning and full.use_curriculum
    assert full.augment_config.apply_prob > 0

    no_aug = ablation_variant("no_aug")
    assert no_aug.augment_config.apply_prob == 0.0

    no_cur = ablation_variant("no_curriculum")
    assert not no_cur.use_curriculum

    no_vcot = ablation_variant("no_vcot")
    assert not no_vcot.use_reasoning

    with pytest.raises(ValueError, match="bogus"):
        ablation_variant("bogus")


def test_config_file_roundtrip():
    cfg = TrainConfig(lr=3e-4, batch_size=4, max_epochs=7, patience=2,
                      min_delta=0.01, seed=5, variant="no_aug",
                      stage_epochs=(1, 2, 3), max_steps=100)
    aug = AugmentConfig(rotation_deg_max=4.0, salt_pepper_p=0.02)
    text = render_train_config(cfg, aug)
    cfg2, aug2 = parse_train_config(text)
    assert cfg2 == cfg
    assert aug2 == aug


def test_config_file_unknown_key_rejected():
    with pytest.raises(ValueError, match="warp_speed"):
        parse_train_config("lr = 0.1\nwarp_speed = 9\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_train_config("not a config\n")


def test_history_table_format():
    records = build_corpus(10, seed=12)
    cfg = TrainConfig(max_epochs=2, patience=None, seed=2, stage_epochs=(1, 1, 1))
    result = fit(cfg, records[:8], records[8:])
    table = history_to_table(result.history)
    lines = table.strip().split("\n")
    assert lines[0] == "epoch\ttrain_nll\tval_nll\tstage"
    assert len(lines) == len(result.history) + 1
    assert all(len(line.split("\t")) == 4 for line in lines[1:])
