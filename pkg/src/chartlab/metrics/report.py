"""Evaluation report assembly and rendering.

A Report aggregates overall metrics, per-chart-kind and per-complexity
breakdowns, error-type frequencies and (optionally) an ablation table.
Row orderings are fixed so identical inputs render byte-identically; the
delimited form is tab-separated sections, the text form mirrors the same
tables with aligned columns.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .ngram import bleu, cider_scores
from .scores import ERROR_LABELS, classify_error, cs_score

KIND_ORDER = ("bar", "line", "pie", "scatter")

COMPLEXITY_BINS = ("Low (1-2 Series)", "Medium (3-5 Series)", "High (>5 Series)")

VARIANT_ORDER = ("full", "no_vcot", "no_aug", "no_curriculum")


def complexity_bin(n_series: int) -> str:
    if n_series <= 2:
        return COMPLEXITY_BINS[0]
    if n_series <= 5:
        return COMPLEXITY_BINS[1]
    return COMPLEXITY_BINS[2]


@dataclass(frozen=True)
class EvalRecord:
    id: str
    candidate_summary: str
    reference_summary: str
    candidate_reasoning: str
    facts: object
    chart_kind: str
    complexity: str


@dataclass(frozen=True)
class GroupRow:
    label: str
    count: int
    bleu: float | None
    cider: float | None
    cs: float | None


@dataclass(frozen=True)
class Report:
    total: int
    overall: dict
    per_kind: tuple
    per_complexity: tuple
    error_freq: tuple  # (label, count, percent)
    ablation: tuple | None  # (variant, cider)


def score_records(records) -> dict:
    """Corpus-level BLEU / CIDEr / mean CS over candidate summaries."""
    cands = [r.candidate_summary for r in records]
    refs = [r.reference_summary for r in records]
    per_pair_cider = cider_scores(cands, refs)
    cs_values = [cs_score(r.candidate_summary, r.facts) for r in records]
    return {
        "bleu": bleu(cands, refs),
        "cider": sum(per_pair_cider) / len(per_pair_cider),
        "cs": sum(cs_values) / len(cs_values),
    }


def _group_rows(records, labels, key) -> tuple:
    cands = [r.candidate_summary for r in records]
    refs = [r.reference_summary for r in records]
    pair_cider = cider_scores(cands, refs)  # corpus-wide idf, grouped means
    rows = []
    for label in labels:
        idx = [i for i, r in enumerate(records) if key(r) == label]
        if not idx:
            rows.append(GroupRow(label, 0, None, None, None))
            continue
        sub_c = [cands[i] for i in idx]
        sub_r = [refs[i] for i in idx]
        rows.append(GroupRow(
            label, len(idx),
            bleu(sub_c, sub_r),
            sum(pair_cider[i] for i in idx) / len(idx),
            sum(cs_score(records[i].candidate_summary, records[i].facts)
                for i in idx) / len(idx),
        ))
    return tuple(rows)


def build_report(records, scores: dict, ablation: dict | None = None) -> Report:
    """Assemble the full report from scored eval records.

    `scores` carries the overall metrics (bleu, cider, cs, and ppl when a
    model was scored); `ablation` maps variant name to CIDEr.
    """
    records = list(records)
    if not records:
        raise ValueError("no evaluation records")
    labels = [classify_error(r.candidate_summary, r.facts, r.reference_summary)
              for r in records]
    error_rows = tuple(
        (label, labels.count(label), 100.0 * labels.count(label) / len(records))
        for label in ERROR_LABELS)
    ablation_rows = None
    if ablation is not None:
        unknown = set(ablation) - set(VARIANT_ORDER)
        if unknown:
            raise ValueError(f"unknown ablation variants: {sorted(unknown)}")
        ablation_rows = tuple((v, ablation[v]) for v in VARIANT_ORDER if v in ablation)
    return Report(
        total=len(records),
        overall=dict(scores),
        per_kind=_group_rows(records, KIND_ORDER, lambda r: r.chart_kind),
        per_complexity=_group_rows(records, COMPLEXITY_BINS, lambda r: r.complexity),
        error_freq=error_rows,
        ablation=ablation_rows,
    )


def _fmt(value, digits=4) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def render_delimited(report: Report) -> str:
    """Tab-separated sections, one blank line between them."""
    out = ["overall\tmetric\tvalue"]
    for key in sorted(report.overall):
        out.append(f"overall\t{key}\t{_fmt(report.overall[key], 6)}")
    out.append("")
    out.append("records\ttotal\t" + str(report.total))
    for title, rows in (("by_chart_kind", report.per_kind),
                        ("by_complexity", report.per_complexity)):
        out.append("")
        out.append(f"{title}\tcount\tbleu\tcider\tcs")
        for row in rows:
            out.append(f"{row.label}\t{row.count}\t{_fmt(row.bleu, 6)}"
                       f"\t{_fmt(row.cider, 6)}\t{_fmt(row.cs, 2)}")
    out.append("")
    out.append("error_type\tcount\tpercent")
    for label, count, pct in report.error_freq:
        out.append(f"{label}\t{count}\t{pct:.2f}")
    if report.ablation is not None:
        out.append("")
        out.append("variant\tcider")
        for variant, value in report.ablation:
            out.append(f"{variant}\t{_fmt(value, 6)}")
    return "\n".join(out) + "\n"


def render_text(report: Report) -> str:
    lines = ["== overall metrics =="]
    for key in sorted(report.overall):
        lines.append(f"  {key:<6} {_fmt(report.overall[key], 4)}")
    lines.append("  (bleu is on a 0-1 scale; multiply by 100 for the usual display)")
    lines.append(f"  records scored: {report.total}")

    def table(title, rows):
        lines.append("")
        lines.append(f"== {title} ==")
        width = max(len(r.label) for r in rows)
        lines.append(f"  {'group':<{width}}  {'count':>5}  {'bleu':>8}  {'cider':>8}  {'cs':>7}")
        for r in rows:
            lines.append(f"  {r.label:<{width}}  {r.count:>5}  {_fmt(r.bleu):>8}"
                         f"  {_fmt(r.cider):>8}  {_fmt(r.cs, 2):>7}")

    table("by chart kind", report.per_kind)
    table("by complexity (number of data series)", report.per_complexity)

    lines.append("")
    lines.append("== error types ==")
    for label, count, pct in report.error_freq:
        lines.append(f"  {label:<14} {count:>5}  {pct:6.2f}%")

    if report.ablation is not None:
        lines.append("")
        lines.append("== ablation (CIDEr) ==")
        for variant, value in report.ablation:
            lines.append(f"  {variant:<14} {_fmt(value)}")
    return "\n".join(lines) + "\n"


def report_to_json(report: Report) -> str:
    return json.dumps(asdict(report), sort_keys=True, indent=2)


def report_from_json(text: str) -> Report:
    obj = json.loads(text)
    return Report(
        total=obj["total"],
        overall=obj["overall"],
        per_kind=tuple(GroupRow(**row) for row in obj["per_kind"]),
        per_complexity=tuple(GroupRow(**row) for row in obj["per_complexity"]),
        error_freq=tuple(tuple(row) for row in obj["error_freq"]),
        ablation=tuple(tuple(row) for row in obj["ablation"]) if obj["ablation"] else None,
    )
