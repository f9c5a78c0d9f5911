"""Deterministic reasoning and summary text for a chart.

Reasoning is always exactly three sentences (chart type, then axes, then
trends); the summary is 1-3 sentences built from the first surface form of
every summary-required fact, which makes reference summaries score full
fact recall by construction. Every numeral mentioned is a spec value or a
derived statistic.
"""

from __future__ import annotations

from .facts import KIND_PHRASES, FactList, dominant_series, largest_slice_share, trend_of
from .spec import ChartSpec


def _fact(facts: FactList, kind: str, subject=None):
    for f in facts.facts:
        if f.kind == kind and (subject is None or f.subject == subject):
            return f
    raise KeyError(f"no fact of kind {kind!r}")


def generate_texts(spec: ChartSpec, facts: FactList) -> tuple[str, str]:
    """(reasoning, summary) for the spec; pure and deterministic."""
    return _reasoning(spec, facts), _summary(spec, facts)


def _reasoning(spec: ChartSpec, facts: FactList) -> str:
    kind = spec.chart_kind
    phrase = KIND_PHRASES[kind]
    s1 = f"this is a {phrase}."

    if kind == "pie":
        values = spec.series[0].y
        s2 = f"the pie splits into {len(values)} slices summing to {sum(values)}."
        idx, share = largest_slice_share(values)
        s3 = f"slice {idx + 1} takes the largest share at {round(share)} percent."
    elif kind == "scatter":
        total = sum(len(s.y) for s in spec.series)
        s2 = f"both axes run from 0 to 100 with {total} points plotted."
        s3 = _trend_sentence(spec)
    else:
        s2 = (f"the x axis has {len(spec.x_labels)} categories "
              f"and the y axis runs from 0 to 100.")
        s3 = _trend_sentence(spec)
    return f"{s1} {s2} {s3}"


def _trend_sentence(spec: ChartSpec) -> str:
    parts = [f"series {s.name} is {trend_of(s.y)}" for s in spec.series]
    if len(parts) == 1:
        return parts[0] + "."
    return ", ".join(parts[:-1]) + " and " + parts[-1] + "."


def _summary(spec: ChartSpec, facts: FactList) -> str:
    kind = spec.chart_kind
    if kind == "pie":
        slices = _fact(facts, "point_count").surface_forms[0]
        largest = _fact(facts, "largest_slice").surface_forms[0]
        return f"the pie chart splits into {slices}. {largest}."

    if kind == "scatter":
        count = _fact(facts, "series_count").surface_forms[0]
        points = _fact(facts, "point_count", None).surface_forms[0]
        return f"the scatter plot shows {count} with {points}."

    phrase = KIND_PHRASES[kind]
    if len(spec.series) == 1:
        s = spec.series[0]
        peak = _fact(facts, "max_of_series").surface_forms[0]
        low = _fact(facts, "min_of_series").surface_forms[0]
        trend = _fact(facts, "trend_of_series", s.name).surface_forms[0]
        return f"the {phrase} shows {s.name} {peak} and {low} with {trend}."

    count = _fact(facts, "series_count").surface_forms[0]
    cats = _fact(facts, "point_count", None).surface_forms[0]
    first = f"the {phrase} compares {count} across {cats}."
    dom = dominant_series(spec)
    if dom is None:
        return f"{first} the totals stay close across series."
    lead = _fact(facts, "dominant_series", dom).surface_forms[0]
    return f"{first} {lead} with the highest total."
