"""Instruction-tuning sequences with response-only loss masks.

Layout: BOS, instruction, <reason>, reasoning, </reason>, <summary>,
summary, </summary>, EOS. The loss mask is 0 over BOS and the instruction
and 1 from <reason> onward, so gradients never flow through prompt
positions. The no_vcot variant drops the reasoning segment entirely.
"""

from __future__ import annotations

import numpy as np

from ..model.vocab import (
    BOS,
    EOS,
    REASON_CLOSE,
    REASON_OPEN,
    SUMMARY_CLOSE,
    SUMMARY_OPEN,
    Vocabulary,
)

VARIANTS = ("full", "no_vcot", "no_aug", "no_curriculum")


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return variant


def build_training_sequence(record, vocab: Vocabulary,
                            variant: str = "full") -> tuple[np.ndarray, np.ndarray]:
    """(token_ids, loss_mask) for one corpus record."""
    check_variant(variant)
    ids = [BOS] + vocab.encode(record.instruction)
    mask = [0] * len(ids)
    if variant != "no_vcot":
        ids += [REASON_OPEN] + vocab.encode(record.reasoning) + [REASON_CLOSE]
    ids += [SUMMARY_OPEN] + vocab.encode(record.summary) + [SUMMARY_CLOSE, EOS]
    mask += [1] * (len(ids) - len(mask))
    return np.asarray(ids, dtype=np.int64), np.asarray(mask, dtype=np.float64)
