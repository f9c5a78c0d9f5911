"""Ground-truth chart definitions and their seeded sampler.

A ChartSpec is the single source of truth for a chart: pixels, facts and
texts are all pure functions of it. Values are integers in [0, 100] so
every number that reaches a summary can be matched exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..numcore import PrngStream

CHART_KINDS = ("bar", "line", "pie", "scatter")

SERIES_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta")

CATEGORY_LABELS = ("jan", "feb", "mar", "apr", "may", "jun",
                   "jul", "aug", "sep", "oct", "nov", "dec")

# Bar groups must fit the default 64 px canvas: one column per series plus a
# one-column gap per category inside a 48-column plot area.
BAR_LAYOUT_BUDGET = 48


class SpecError(ValueError):
    """Raised when a ChartSpec violates its invariants."""


@dataclass(frozen=True)
class NamedSeries:
    name: str
    y: tuple
    x: tuple | None = None


@dataclass(frozen=True)
class ChartSpec:
    chart_kind: str
    series: tuple
    x_labels: tuple
    seed: int


def validate_spec(spec: ChartSpec) -> None:
    if spec.chart_kind not in CHART_KINDS:
        raise SpecError(f"unknown chart kind {spec.chart_kind!r}")
    if not 0 <= spec.seed < 2**64:
        raise SpecError("seed must be a 64-bit unsigned integer")
    if not spec.series:
        raise SpecError("at least one series required")
    names = [s.name for s in spec.series]
    if len(set(names)) != len(names):
        raise SpecError("series names must be distinct")
    for s in spec.series:
        for v in s.y:
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 100:
                raise SpecError(f"series {s.name!r}: y values must be integers in [0, 100]")
    kind = spec.chart_kind
    if kind == "pie":
        if len(spec.series) != 1:
            raise SpecError("pie charts have exactly one series")
        s = spec.series[0]
        if not 2 <= len(s.y) <= 8:
            raise SpecError("pie charts need 2..8 slices")
        if any(v <= 0 for v in s.y):
            raise SpecError("pie slice values must be positive")
        if s.x is not None or spec.x_labels:
            raise SpecError("pie charts carry neither x values nor x labels")
    elif kind in ("bar", "line"):
        if not 1 <= len(spec.series) <= 8:
            raise SpecError(f"{kind} charts need 1..8 series")
        if not 2 <= len(spec.x_labels) <= 12:
            raise SpecError(f"{kind} charts need 2..12 x labels")
        for s in spec.series:
            if len(s.y) != len(spec.x_labels):
                raise SpecError(f"series {s.name!r}: |y| must equal |x_labels|")
            if s.x is not None:
                raise SpecError(f"{kind} series carry no x values")
    else:  # scatter
        if not 1 <= len(spec.series) <= 8:
            raise SpecError("scatter charts need 1..8 series")
        if spec.x_labels:
            raise SpecError("scatter charts carry no x labels")
        for s in spec.series:
            if s.x is None or len(s.x) != len(s.y):
                raise SpecError(f"series {s.name!r}: scatter needs |x| == |y|")
            if not 2 <= len(s.y) <= 12:
                raise SpecError(f"series {s.name!r}: scatter needs 2..12 points")
            for v in s.x:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 100:
                    raise SpecError(f"series {s.name!r}: x values must be integers in [0, 100]")


def is_valid_spec(spec: ChartSpec) -> bool:
    try:
        validate_spec(spec)
    except SpecError:
        return False
    return True


def _sample_values(rng: PrngStream, n: int, lo: int = 0, hi: int = 100) -> tuple:
    return tuple(rng.randint(lo, hi) for _ in range(n))


def sample_spec(rng: PrngStream, stage_filter: int | None = None) -> ChartSpec:
    """Draw a valid ChartSpec from the stream.

    stage_filter limits structural complexity: stage 0 admits only bar/line
    with at most 2 series, stage 1 admits any kind with at most 5 series,
    stage 2 admits everything. Retries internally until the spec validates.
    """
    if stage_filter is not None and stage_filter not in (0, 1, 2):
        raise ValueError(f"stage_filter must be 0, 1 or 2, got {stage_filter!r}")
    while True:
        spec = _sample_once(rng, stage_filter)
        if is_valid_spec(spec):
            return spec


def _sample_once(rng: PrngStream, stage_filter: int | None) -> ChartSpec:
    if stage_filter == 0:
        kind = rng.choice(("bar", "line"))
        max_series = 2
    elif stage_filter == 1:
        kind = rng.choice(CHART_KINDS)
        max_series = 5
    else:
        kind = rng.choice(CHART_KINDS)
        max_series = 8
    seed = rng.next_u64()

    if kind == "pie":
        k = rng.randint(2, 8)
        values = tuple(rng.randint(1, 100) for _ in range(k))
        series = (NamedSeries(SERIES_NAMES[0], values),)
        return ChartSpec("pie", series, (), seed)

    n_series = rng.randint(1, max_series)

    if kind == "scatter":
        series = []
        for i in range(n_series):
            n = rng.randint(2, 12)
            series.append(NamedSeries(SERIES_NAMES[i],
                                      _sample_values(rng, n),
                                      _sample_values(rng, n)))
        return ChartSpec("scatter", tuple(series), (), seed)

    if kind == "bar":
        max_cats = min(12, BAR_LAYOUT_BUDGET // (n_series + 1))
        n_cats = rng.randint(2, max_cats)
    else:
        n_cats = rng.randint(2, 12)
    offset = rng.randrange(len(CATEGORY_LABELS))
    labels = tuple(CATEGORY_LABELS[(offset + i) % len(CATEGORY_LABELS)]
                   for i in range(n_cats))
    series = tuple(NamedSeries(SERIES_NAMES[i], _sample_values(rng, n_cats))
                   for i in range(n_series))
    return ChartSpec(kind, series, labels, seed)
