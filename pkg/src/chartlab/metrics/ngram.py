"""Corpus-level n-gram metrics built from scratch.

bleu: clipped n-gram precision counts pooled over the corpus, geometric
mean over n = 1..4, multiplied by the brevity penalty exp(1 - r/c) when
the candidate side is shorter. No smoothing: any empty precision gives 0.
Scores are reported on a 0-1 scale (multiply by 100 for the conventional
display convention).

cider: for each n, cosine similarity between tf-idf n-gram vectors of
candidate and reference, idf = ln(N / df) with document frequencies over
the reference set (df clipped to >= 1, idf floored at a tiny positive
value so degenerate one-document corpora stay well defined), averaged
over n and scaled by 10.
"""

from __future__ import annotations

import math
from collections import Counter

from .. import textnorm

MAX_N = 4
IDF_FLOOR = 1e-12


def ngram_counts(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _check_corpus(candidates, references):
    if len(candidates) != len(references):
        raise ValueError(
            f"candidate/reference counts differ: {len(candidates)} vs {len(references)}")
    if not candidates:
        raise ValueError("empty evaluation corpus")


def bleu(candidates, references, max_n: int = MAX_N) -> float:
    """Corpus BLEU in [0, 1]; one reference per candidate."""
    _check_corpus(candidates, references)
    matched = [0] * max_n
    total = [0] * max_n
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        c_tok = textnorm.tokenize(cand)
        r_tok = textnorm.tokenize(ref)
        cand_len += len(c_tok)
        ref_len += len(r_tok)
        for n in range(1, max_n + 1):
            c_counts = ngram_counts(c_tok, n)
            r_counts = ngram_counts(r_tok, n)
            total[n - 1] += sum(c_counts.values())
            matched[n - 1] += sum(min(count, r_counts[g]) for g, count in c_counts.items())
    if any(t == 0 or m == 0 for m, t in zip(matched, total)):
        return 0.0
    log_mean = sum(math.log(m / t) for m, t in zip(matched, total)) / max_n
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_mean)


def cider_scores(candidates, references, max_n: int = MAX_N) -> list[float]:
    """Per-pair CIDEr scores (already scaled by 10)."""
    _check_corpus(candidates, references)
    ref_tokens = [textnorm.tokenize(r) for r in references]
    n_docs = len(references)
    df = [Counter() for _ in range(max_n)]
    for toks in ref_tokens:
        for n in range(1, max_n + 1):
            for gram in set(ngram_counts(toks, n)):
                df[n - 1][gram] += 1

    def idf(n, gram):
        return max(math.log(n_docs / max(df[n - 1][gram], 1)), IDF_FLOOR)

    scores = []
    for cand, r_tok in zip(candidates, ref_tokens):
        c_tok = textnorm.tokenize(cand)
        sims = []
        for n in range(1, max_n + 1):
            c_vec = {g: c * idf(n, g) for g, c in ngram_counts(c_tok, n).items()}
            r_vec = {g: c * idf(n, g) for g, c in ngram_counts(r_tok, n).items()}
            dot = sum(w * r_vec[g] for g, w in c_vec.items() if g in r_vec)
            norm_c = math.sqrt(sum(w * w for w in c_vec.values()))
            norm_r = math.sqrt(sum(w * w for w in r_vec.values()))
            sims.append(dot / (norm_c * norm_r) if norm_c > 0 and norm_r > 0 else 0.0)
        scores.append(10.0 * sum(sims) / max_n)
    return scores


def cider(candidates, references, max_n: int = MAX_N) -> float:
    scores = cider_scores(candidates, references, max_n)
    return sum(scores) / len(scores)
