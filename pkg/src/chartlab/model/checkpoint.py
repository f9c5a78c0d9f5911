"""Binary checkpoint files.

Layout: 4-byte magic, uint32 little-endian header length, UTF-8 JSON header
(format version, model config, vocabulary tokens, per-parameter manifest of
name/shape/offset), then raw little-endian float32 arrays concatenated in
manifest order. Parameters are stored at 32-bit precision; loading restores
float64 working tensors whose values round-trip bit-exactly through a
second save.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict

import numpy as np

from ..numcore import Tensor
from .network import ModelConfig, ModelParams, parameter_shapes
from .vocab import Vocabulary

MAGIC = b"CLB1"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(params: ModelParams, vocab: Vocabulary, path) -> None:
    manifest = []
    payload = bytearray()
    for name, tensor in params.tensors.items():
        arr = np.ascontiguousarray(tensor.data, dtype="<f4")
        manifest.append({"name": name, "shape": list(tensor.shape),
                         "offset": len(payload)})
        payload.extend(arr.tobytes())
    header = {
        "format_version": FORMAT_VERSION,
        "config": asdict(params.config),
        "vocab": list(vocab.tokens),
        "params": manifest,
        "payload_bytes": len(payload),
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)


def load_checkpoint(path) -> tuple[ModelParams, Vocabulary]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file (bad magic)")
    header_len = struct.unpack("<I", raw[4:8])[0]
    if len(raw) < 8 + header_len:
        raise CheckpointError(f"{path}: truncated header")
    try:
        header = json.loads(raw[8:8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header ({exc})") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version "
                              f"{header.get('format_version')!r}")
    payload = raw[8 + header_len:]
    if len(payload) != header["payload_bytes"]:
        raise CheckpointError(
            f"{path}: truncated payload ({len(payload)} bytes, "
            f"manifest promises {header['payload_bytes']})")

    config = ModelConfig(**header["config"])
    vocab = Vocabulary(header["vocab"])
    expected = parameter_shapes(config)
    listed = {entry["name"] for entry in header["params"]}
    for name in expected:
        if name not in listed:
            raise CheckpointError(f"{path}: parameter {name!r} missing from manifest")

    tensors = {}
    expected_offset = 0
    for entry in header["params"]:
        name, shape, offset = entry["name"], tuple(entry["shape"]), entry["offset"]
        if name not in expected:
            raise CheckpointError(f"{path}: unexpected parameter {name!r} in manifest")
        if shape != expected[name]:
            raise CheckpointError(
                f"{path}: parameter {name!r} has manifest shape {shape}, "
                f"config implies {expected[name]}")
        if offset != expected_offset:
            raise CheckpointError(
                f"{path}: parameter {name!r} manifest offset {offset} "
                f"disagrees with running total {expected_offset}")
        count = int(np.prod(shape))
        expected_offset += count * 4
        if expected_offset > len(payload):
            raise CheckpointError(f"{path}: parameter {name!r} runs past end of payload")
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset).reshape(shape)
        tensors[name] = Tensor(arr.astype(np.float64), requires_grad=True)
    if expected_offset != len(payload):
        raise CheckpointError(f"{path}: payload has {len(payload) - expected_offset} "
                              "trailing bytes not claimed by the manifest")
    return ModelParams(config, tensors), vocab
