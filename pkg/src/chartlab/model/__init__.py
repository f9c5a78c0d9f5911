"""Image-conditioned text model: vocabulary, network, adapters, checkpoints."""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .lora import (
    LoraAdapter,
    LoraError,
    LoraParams,
    expected_trainable_count,
    lora_inject,
    lora_merge,
)
from .network import (
    ConfigError,
    GenerationConfig,
    ModelConfig,
    ModelParams,
    SequenceScore,
    attention_projection_names,
    decoder_logits,
    encode_image,
    encoder_features,
    generate_vcot,
    image_to_patches,
    init_model,
    parameter_shapes,
    segment_bounds,
    sequence_log_prob,
)
from .vocab import (
    BOS,
    DIGITS,
    EOS,
    PAD,
    REASON_CLOSE,
    REASON_OPEN,
    SPECIAL_TOKENS,
    SUMMARY_CLOSE,
    SUMMARY_OPEN,
    VocabError,
    Vocabulary,
    build_vocabulary,
)

__all__ = [
    "CheckpointError",
    "load_checkpoint",
    "save_checkpoint",
    "LoraAdapter",
    "LoraError",
    "LoraParams",
    "expected_trainable_count",
    "lora_inject",
    "lora_merge",
    "ConfigError",
    "GenerationConfig",
    "ModelConfig",
    "ModelParams",
    "SequenceScore",
    "attention_projection_names",
    "decoder_logits",
    "encode_image",
    "encoder_features",
    "generate_vcot",
    "image_to_patches",
    "init_model",
    "parameter_shapes",
    "segment_bounds",
    "sequence_log_prob",
    "BOS",
    "DIGITS",
    "EOS",
    "PAD",
    "REASON_CLOSE",
    "REASON_OPEN",
    "SPECIAL_TOKENS",
    "SUMMARY_CLOSE",
    "SUMMARY_OPEN",
    "VocabError",
    "Vocabulary",
    "build_vocabulary",
]
