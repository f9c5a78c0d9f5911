import struct

import numpy as np
import pytest

from chartlab.chartgen import build_corpus, render_chart
from chartlab.model import (
    CheckpointError,
    ModelConfig,
    build_vocabulary,
    init_model,
    load_checkpoint,
    save_checkpoint,
    sequence_log_prob,
)
from chartlab.numcore import PrngStream
from chartlab.train import build_training_sequence


def setup(tmp_path):
    records = build_corpus(4, seed=8)
    vocab = build_vocabulary(records)
    cfg = ModelConfig(vocab_size=len(vocab), d_model=32, n_heads=2,
                      enc_layers=1, dec_layers=1, patch=16)
    params = init_model(cfg, PrngStream(0).child("init"))
    path = tmp_path / "model.ckpt"
    save_checkpoint(params, vocab, path)
    return records, vocab, cfg, params, path


def test_roundtrip_preserves_forward_outputs(tmp_path):
    records, vocab, cfg, params, path = setup(tmp_path)
    loaded, vocab2 = load_checkpoint(path)
    assert vocab2.tokens == vocab.tokens
    assert loaded.config == cfg

    # a second save/load is bit-stable at the stored 32-bit precision
    path2 = tmp_path / "model2.ckpt"
    save_checkpoint(loaded, vocab2, path2)
    assert path.read_bytes() == path2.read_bytes()
    loaded2, _ = load_checkpoint(path2)

    r = records[0]
    img = render_chart(r.spec, cfg.image_size)
    ids, _ = build_training_sequence(r, vocab)
    a = sequence_log_prob(loaded, img, ids).per_token
    b = sequence_log_prob(loaded2, img, ids).per_token
    np.testing.assert_array_equal(a, b)


def test_truncated_file_reports_truncation(tmp_path):
    _, _, _, _, path = setup(tmp_path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) - 100])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_bad_magic_rejected(tmp_path):
    _, _, _, _, path = setup(tmp_path)
    blob = path.read_bytes()
    path.write_bytes(b"XXXX" + blob[4:])
    with pytest.raises(CheckpointError, match="magic"):
        load_checkpoint(path)


def test_edited_manifest_dim_names_parameter(tmp_path):
    _, _, _, _, path = setup(tmp_path)
    blob = path.read_bytes()
    header_len = struct.unpack("<I", blob[4:8])[0]
    header = blob[8:8 + header_len].decode("utf-8")
    # grow the patch projection's first dim in the manifest only
    target = '"name":"enc.patch.w","offset":0,"shape":[256,32]'
    assert target in header
    tampered = header.replace(target, '"name":"enc.patch.w","offset":0,"shape":[257,32]')
    path.write_bytes(blob[:4] + struct.pack("<I", len(tampered.encode())) +
                     tampered.encode() + blob[8 + header_len:])
    with pytest.raises(CheckpointError, match="enc.patch.w"):
        load_checkpoint(path)
