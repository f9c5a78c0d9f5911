"""From-scratch evaluation: BLEU, CIDEr, perplexity, fact recall, errors."""

from .evaluate import evaluate_model, make_eval_records
from .ngram import bleu, cider, cider_scores, ngram_counts
from .report import (
    COMPLEXITY_BINS,
    KIND_ORDER,
    VARIANT_ORDER,
    EvalRecord,
    GroupRow,
    Report,
    build_report,
    complexity_bin,
    render_delimited,
    render_text,
    report_from_json,
    report_to_json,
    score_records,
)
from .scores import (
    ERROR_LABELS,
    classify_error,
    contradiction_surfaces,
    cs_score,
    perplexity,
)

__all__ = [
    "evaluate_model",
    "make_eval_records",
    "bleu",
    "cider",
    "cider_scores",
    "ngram_counts",
    "COMPLEXITY_BINS",
    "KIND_ORDER",
    "VARIANT_ORDER",
    "EvalRecord",
    "GroupRow",
    "Report",
    "build_report",
    "complexity_bin",
    "render_delimited",
    "render_text",
    "report_from_json",
    "report_to_json",
    "score_records",
    "ERROR_LABELS",
    "classify_error",
    "contradiction_surfaces",
    "cs_score",
    "perplexity",
]
