"""Instruction fine-tuning: augmentation, sequences, curriculum, loop."""

from .augment import (
    AugmentConfig,
    AugmentParams,
    apply_augment_params,
    augment,
    rotate_bilinear,
    sample_augment_params,
    scale_bilinear,
    translate,
)
from .curriculum import CurriculumSchedule, curriculum_order
from .loop import (
    FitResult,
    HistoryRow,
    TrainConfig,
    TrainingDivergedError,
    VariantSettings,
    ablation_variant,
    evaluate_nll,
    fit,
    history_to_table,
    parse_train_config,
    render_cache,
    render_train_config,
    train_step,
)
from .sequences import VARIANTS, build_training_sequence, check_variant

__all__ = [
    "AugmentConfig",
    "AugmentParams",
    "apply_augment_params",
    "augment",
    "rotate_bilinear",
    "sample_augment_params",
    "scale_bilinear",
    "translate",
    "CurriculumSchedule",
    "curriculum_order",
    "FitResult",
    "HistoryRow",
    "TrainConfig",
    "TrainingDivergedError",
    "VariantSettings",
    "ablation_variant",
    "evaluate_nll",
    "fit",
    "history_to_table",
    "parse_train_config",
    "render_cache",
    "render_train_config",
    "train_step",
    "VARIANTS",
    "build_training_sequence",
    "check_variant",
]
