"""Canonical machine-checkable facts derived from a ChartSpec.

Facts power the fact-recall score and the error classifier: each fact
carries lowercase surface forms, and the summary templates embed the first
surface form of every summary-required fact, so reference summaries always
score 100% recall by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .spec import ChartSpec, validate_spec

TREND_NAMES = ("increasing", "decreasing", "flat", "mixed")

KIND_PHRASES = {
    "bar": "bar chart",
    "line": "line chart",
    "pie": "pie chart",
    "scatter": "scatter plot",
}

# axis endpoints always appear on rendered charts and in reasoning text
AXIS_BOUNDS = (0, 100)


@dataclass(frozen=True)
class Fact:
    kind: str
    subject: str | int | None
    value: object
    surface_forms: tuple
    summary_required: bool


@dataclass(frozen=True)
class FactList:
    facts: tuple
    allowed_numerals: frozenset  # every number a faithful text may mention

    def required(self) -> list:
        return [f for f in self.facts if f.summary_required]


def trend_of(values) -> str:
    """Trend by pairwise comparison of consecutive values."""
    diffs = [b - a for a, b in zip(values, values[1:])]
    if all(d > 0 for d in diffs):
        return "increasing"
    if all(d < 0 for d in diffs):
        return "decreasing"
    if all(d == 0 for d in diffs):
        return "flat"
    return "mixed"


def largest_slice_share(values) -> tuple[int, float]:
    """(slice index, share in percent) of the largest pie slice."""
    total = sum(values)
    idx = max(range(len(values)), key=lambda i: (values[i], -i))
    return idx, 100.0 * values[idx] / total


def dominant_series(spec: ChartSpec) -> str | None:
    """Name of the series with the strictly largest total, if any."""
    if len(spec.series) < 2:
        return None
    totals = [sum(s.y) for s in spec.series]
    best = max(totals)
    if totals.count(best) > 1:
        return None
    return spec.series[totals.index(best)].name


def derive_facts(spec: ChartSpec) -> FactList:
    validate_spec(spec)
    kind = spec.chart_kind
    phrase = KIND_PHRASES[kind]
    n_series = len(spec.series)
    facts: list[Fact] = []
    numerals: set[float] = set(AXIS_BOUNDS)

    facts.append(Fact("chart_type", None, kind,
                      (phrase, kind), True))

    count_required = kind in ("scatter",) or (kind in ("bar", "line") and n_series > 1)
    facts.append(Fact("series_count", None, n_series,
                      (f"{n_series} series",), count_required))
    numerals.add(n_series)

    for s in spec.series:
        numerals.update(s.y)
        numerals.add(sum(s.y))
        if s.x is not None:
            numerals.update(s.x)

    if kind == "pie":
        values = spec.series[0].y
        k = len(values)
        facts.append(Fact("point_count", spec.series[0].name, k,
                          (f"{k} slices",), True))
        idx, share = largest_slice_share(values)
        slice_no = idx + 1
        rounded = round(share)
        facts.append(Fact(
            "largest_slice", idx, share,
            (f"slice {slice_no} takes the largest share at {rounded} percent",
             f"largest slice is slice {slice_no}",
             f"slice {slice_no} is the largest"),
            True))
        numerals.update({k, share, float(rounded), slice_no})
        numerals.update(range(1, k + 1))
        s = spec.series[0]
        facts.extend(_extrema_facts(s.name, values, required=False))
        return FactList(tuple(facts), frozenset(numerals))

    if kind == "scatter":
        total_points = sum(len(s.y) for s in spec.series)
        facts.append(Fact("point_count", None, total_points,
                          (f"{total_points} points",), True))
        numerals.add(total_points)
        for s in spec.series:
            facts.append(Fact("point_count", s.name, len(s.y), (f"{len(s.y)} points",), False))
            numerals.add(len(s.y))
    else:
        n_cats = len(spec.x_labels)
        facts.append(Fact("point_count", None, n_cats,
                          (f"{n_cats} categories",), n_series > 1))
        numerals.add(n_cats)

    single = n_series == 1
    for s in spec.series:
        facts.extend(_extrema_facts(s.name, s.y, required=single and kind != "scatter"))
        trend = trend_of(s.y)
        facts.append(Fact(
            "trend_of_series", s.name, trend,
            (f"an {trend} trend" if trend[0] in "aeiou" else f"a {trend} trend",
             f"{s.name} is {trend}",
             f"trend is {trend}"),
            single and kind != "scatter"))

    dom = dominant_series(spec)
    if dom is not None:
        facts.append(Fact(
            "dominant_series", dom, dom,
            (f"{dom} leads", f"{dom} dominates", f"{dom} has the highest total"),
            kind in ("bar", "line")))

    return FactList(tuple(facts), frozenset(numerals))


def _extrema_facts(name: str, values, required: bool) -> list[Fact]:
    vmax = max(values)
    vmin = min(values)
    return [
        Fact("max_of_series", (name, values.index(vmax)), vmax,
             (f"peaking at {vmax}", f"peaks at {vmax}", f"maximum of {vmax}",
              f"high of {vmax}"),
             required),
        Fact("min_of_series", (name, values.index(vmin)), vmin,
             (f"dipping to {vmin}", f"low of {vmin}", f"minimum of {vmin}"),
             required),
    ]
