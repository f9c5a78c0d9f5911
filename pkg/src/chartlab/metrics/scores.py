"""Fact recall, summary perplexity and the rule-based error classifier."""

from __future__ import annotations

import math

from .. import textnorm
from ..chartgen.facts import TREND_NAMES, FactList
from ..model.network import segment_bounds, sequence_log_prob
from ..train.sequences import build_training_sequence

NUMERAL_REL_TOL = 0.01
INCOMPLETE_RECALL_THRESHOLD = 60.0
MAX_SUMMARY_TOKENS = 96

ERROR_LABELS = ("hallucination", "reasoning", "incomplete", "other", "none")

TREND_SURFACES = {
    "increasing": ("increasing", "rising", "climbing", "upward"),
    "decreasing": ("decreasing", "falling", "declining", "downward"),
    "flat": ("flat", "steady", "constant"),
    "mixed": ("mixed", "fluctuating"),
}


def cs_score(candidate: str, facts: FactList) -> float:
    """Required-fact recall as a percentage of summary-required facts."""
    required = facts.required()
    if not required:
        raise ValueError("fact list has no summary-required facts")
    norm = textnorm.normalize(candidate)
    matched = sum(
        1 for f in required
        if any(textnorm.contains_phrase(norm, s) for s in f.surface_forms))
    return 100.0 * matched / len(required)


def _numeral_grounded(value: float, allowed) -> bool:
    return any(abs(value - a) <= NUMERAL_REL_TOL * abs(a) + 1e-9 for a in allowed)


def contradiction_surfaces(facts: FactList) -> list[str]:
    """Phrases that would assert a wrong trend, dominance or largest slice."""
    phrases: list[str] = []
    series_names = [f.subject for f in facts.facts if f.kind == "trend_of_series"]
    for f in facts.facts:
        if f.kind == "trend_of_series":
            for wrong in TREND_NAMES:
                if wrong == f.value:
                    continue
                for word in TREND_SURFACES[wrong]:
                    phrases.append(f"{f.subject} is {word}")
                    if f.summary_required:
                        # single-series charts also speak of "the" trend
                        article = "an" if word[0] in "aeiou" else "a"
                        phrases.append(f"{article} {word} trend")
                        phrases.append(f"trend is {word}")
        elif f.kind == "dominant_series":
            for other in series_names:
                if other == f.value:
                    continue
                phrases.extend((f"{other} leads", f"{other} dominates",
                                f"{other} has the highest total"))
        elif f.kind == "largest_slice":
            slice_count = next((g.value for g in facts.facts
                                if g.kind == "point_count"), 0)
            for j in range(1, slice_count + 1):
                if j == f.subject + 1:
                    continue
                phrases.extend((f"slice {j} takes the largest share",
                                f"largest slice is slice {j}",
                                f"slice {j} is the largest"))
    return phrases


def classify_error(candidate: str, facts: FactList, reference: str) -> str:
    """First matching rule wins: hallucination, reasoning, incomplete, other."""
    norm = textnorm.normalize(candidate)
    for numeral in textnorm.extract_numerals(norm):
        if not _numeral_grounded(numeral, facts.allowed_numerals):
            return "hallucination"
    for phrase in contradiction_surfaces(facts):
        if textnorm.contains_phrase(norm, phrase):
            return "reasoning"
    if cs_score(candidate, facts) < INCOMPLETE_RECALL_THRESHOLD:
        return "incomplete"
    if not 1 <= textnorm.sentence_count(norm) <= 3:
        return "other"
    if textnorm.token_count(norm) > MAX_SUMMARY_TOKENS:
        return "other"
    return "none"


def perplexity(params, records, vocab, renders: dict, variant: str = "full") -> float:
    """exp(mean NLL per reference-summary token), teacher forced.

    Summary tokens are everything after the summary-open marker through EOS;
    reasoning tokens condition the model but are excluded from the average.
    """
    total_nll = 0.0
    total_tokens = 0
    for r in records:
        ids, _ = build_training_sequence(r, vocab, variant)
        _, summary_start = segment_bounds(ids)
        score = sequence_log_prob(params, renders[r.id], ids)
        seg = score.per_token[summary_start:]
        total_nll += -float(seg.sum())
        total_tokens += len(seg)
    if total_tokens == 0:
        raise ValueError("no summary tokens to score")
    return math.exp(total_nll / total_tokens)
