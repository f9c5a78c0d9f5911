"""End-to-end model evaluation: generate candidates, score, report."""

from __future__ import annotations

from ..chartgen.facts import derive_facts
from ..model.network import GenerationConfig, generate_vcot
from ..train.loop import render_cache
from .report import EvalRecord, build_report, complexity_bin, score_records
from .scores import perplexity


def make_eval_records(params, vocab, records, variant: str = "full") -> list[EvalRecord]:
    """Greedy-decode every record and pair the outputs with ground truth."""
    gen = GenerationConfig(use_reasoning=(variant != "no_vcot"))
    renders = render_cache(records, params.config.image_size)
    out = []
    for r in records:
        reasoning_ids, summary_ids = generate_vcot(
            params, renders[r.id], vocab.encode(r.instruction), gen)
        out.append(EvalRecord(
            id=r.id,
            candidate_summary=vocab.decode(summary_ids),
            reference_summary=r.summary,
            candidate_reasoning=vocab.decode(reasoning_ids),
            facts=derive_facts(r.spec),
            chart_kind=r.spec.chart_kind,
            complexity=complexity_bin(len(r.spec.series)),
        ))
    return out


def evaluate_model(params, vocab, records, variant: str = "full",
                   ablation: dict | None = None):
    """(eval records, Report) for a trained model on held-out records."""
    eval_records = make_eval_records(params, vocab, records, variant)
    scores = score_records(eval_records)
    renders = render_cache(records, params.config.image_size)
    scores["ppl"] = perplexity(params, records, vocab, renders, variant)
    return eval_records, build_report(eval_records, scores, ablation)
