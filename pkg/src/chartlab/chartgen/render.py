"""Deterministic rasterizer: ChartSpec -> grayscale pixel grid.

Foreground ink is 1.0 on a 0.0 background. Multi-series marks use distinct
gray levels (>= 0.3) so series identity survives in pixels; axes, ticks and
digit glyphs are always full ink. Numeric tick labels use a 3x5 bitmap font;
categorical x labels appear as index tick marks only. Rendering is a pure
function of (spec, resolution).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spec import ChartSpec, validate_spec

MIN_RESOLUTION = 48

# left margin holds up to "100" (11 cols) + gap + tick mark
AXIS_COL = 13
BOTTOM_MARGIN = 8
TOP_MARGIN = 2
RIGHT_MARGIN = 1

GLYPH_W = 3
GLYPH_H = 5
GLYPH_GAP = 1

DIGIT_FONT = {
    "0": ("111", "101", "101", "101", "111"),
    "1": ("010", "110", "010", "010", "111"),
    "2": ("111", "001", "111", "100", "111"),
    "3": ("111", "001", "111", "001", "111"),
    "4": ("101", "101", "111", "001", "001"),
    "5": ("111", "100", "111", "001", "111"),
    "6": ("111", "100", "111", "101", "111"),
    "7": ("111", "001", "001", "001", "001"),
    "8": ("111", "101", "111", "101", "111"),
    "9": ("111", "101", "111", "001", "111"),
}

Y_TICK_VALUES = (0, 50, 100)
X_TICK_VALUES = (0, 50, 100)  # scatter only


class SizingError(ValueError):
    """Requested resolution cannot fit margins, glyphs and marks."""


@dataclass(frozen=True)
class RenderedChart:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) float64 in [0, 1]
    source_seed: int


@dataclass(frozen=True)
class TickLabel:
    text: str
    top_row: int
    left_col: int  # glyphs run right from here, GLYPH_W + GLYPH_GAP apart


def _iround(x: float) -> int:
    return math.floor(x + 0.5)


def _label_width(text: str) -> int:
    return len(text) * GLYPH_W + (len(text) - 1) * GLYPH_GAP


class _Layout:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.axis_col = AXIS_COL
        self.axis_row = height - BOTTOM_MARGIN
        self.plot_left = self.axis_col + 1
        self.plot_right = width - 1 - RIGHT_MARGIN
        self.plot_top = TOP_MARGIN
        self.plot_bot = self.axis_row - 1
        self.plot_w = self.plot_right - self.plot_left + 1
        self.plot_h = self.plot_bot - self.plot_top + 1

    def row_of(self, value: float) -> int:
        span = self.plot_bot - self.plot_top
        return self.plot_bot - _iround(value * span / 100.0)

    def col_of(self, value: float) -> int:
        return self.plot_left + _iround(value * (self.plot_w - 1) / 100.0)

    def bar_height(self, value: float) -> int:
        span = self.plot_bot - self.plot_top
        return _iround(value * span / 100.0)


def _series_level(index: int, count: int) -> float:
    if count == 1:
        return 1.0
    return 0.5 + 0.5 * (index + 1) / count


def _slice_level(index: int, count: int) -> float:
    # capped at 0.9 so no slice fill collides with the full-ink rim
    return 0.3 + 0.6 * (index + 1) / count


def _draw_glyph(px: np.ndarray, ch: str, top: int, left: int) -> None:
    rows = DIGIT_FONT[ch]
    for r, bits in enumerate(rows):
        for c, bit in enumerate(bits):
            if bit == "1":
                px[top + r, left + c] = 1.0


def _draw_label(px: np.ndarray, text: str, top: int, left: int) -> None:
    for i, ch in enumerate(text):
        _draw_glyph(px, ch, top, left + i * (GLYPH_W + GLYPH_GAP))


def _draw_segment(px: np.ndarray, r0: int, c0: int, r1: int, c1: int, level: float) -> None:
    steps = max(abs(r1 - r0), abs(c1 - c0), 1)
    for t in range(steps + 1):
        r = r0 + _iround(t * (r1 - r0) / steps)
        c = c0 + _iround(t * (c1 - c0) / steps)
        px[r, c] = max(px[r, c], level)


def tick_annotations(spec: ChartSpec, resolution: int = 64) -> list[TickLabel]:
    """Positions of every numeric tick label the renderer will draw."""
    _check_resolution(resolution)
    lay = _Layout(resolution, resolution)
    labels: list[TickLabel] = []
    if spec.chart_kind == "pie":
        return labels
    for v in Y_TICK_VALUES:
        text = str(v)
        row = lay.row_of(v)
        left = lay.axis_col - 2 - _label_width(text)
        labels.append(TickLabel(text, row - GLYPH_H // 2, left))
    if spec.chart_kind == "scatter":
        for v in X_TICK_VALUES:
            text = str(v)
            w = _label_width(text)
            left = lay.col_of(v) - w // 2
            left = max(0, min(left, resolution - w))
            labels.append(TickLabel(text, lay.axis_row + 2, left))
    return labels


def _check_resolution(resolution: int) -> None:
    if resolution < MIN_RESOLUTION:
        raise SizingError(
            f"resolution {resolution} below minimum {MIN_RESOLUTION}: "
            "margins and tick glyphs do not fit"
        )


def render_chart(spec: ChartSpec, resolution: int = 64) -> RenderedChart:
    validate_spec(spec)
    _check_resolution(resolution)
    lay = _Layout(resolution, resolution)
    px = np.zeros((resolution, resolution), dtype=np.float64)

    if spec.chart_kind == "pie":
        _render_pie(px, lay, spec)
    else:
        _render_axes(px, lay, spec)
        if spec.chart_kind == "bar":
            _render_bars(px, lay, spec)
        elif spec.chart_kind == "line":
            _render_lines(px, lay, spec)
        else:
            _render_scatter(px, lay, spec)

    np.clip(px, 0.0, 1.0, out=px)
    return RenderedChart(resolution, resolution, px, spec.seed)


def _render_axes(px: np.ndarray, lay: _Layout, spec: ChartSpec) -> None:
    px[lay.plot_top:lay.axis_row + 1, lay.axis_col] = 1.0
    px[lay.axis_row, lay.axis_col:lay.plot_right + 1] = 1.0
    for label in tick_annotations(spec, lay.width):
        _draw_label(px, label.text, label.top_row, label.left_col)
    for v in Y_TICK_VALUES:
        px[lay.row_of(v), lay.axis_col - 1] = 1.0
    if spec.chart_kind == "scatter":
        for v in X_TICK_VALUES:
            px[lay.axis_row + 1, lay.col_of(v)] = 1.0
    elif spec.x_labels:
        # categorical labels become index markers: one tick per category
        n = len(spec.x_labels)
        for i in range(n):
            col = _category_center(lay, spec, i)
            px[lay.axis_row + 1:lay.axis_row + 3, col] = 1.0


def _category_center(lay: _Layout, spec: ChartSpec, i: int) -> int:
    n = len(spec.x_labels)
    if spec.chart_kind == "bar":
        group = lay.plot_w // n
        return lay.plot_left + i * group + group // 2
    return lay.plot_left + _iround(i * (lay.plot_w - 1) / (n - 1))


def _render_bars(px: np.ndarray, lay: _Layout, spec: ChartSpec) -> None:
    n_cat = len(spec.x_labels)
    n_series = len(spec.series)
    group = lay.plot_w // n_cat
    if group < n_series + 1:
        raise SizingError(
            f"resolution {lay.width} too small for {n_series} series x {n_cat} "
            f"categories: group width {group} leaves no room for bars"
        )
    bar_w = (group - 1) // n_series
    for ci in range(n_cat):
        start = lay.plot_left + ci * group
        for si, series in enumerate(spec.series):
            h = lay.bar_height(series.y[ci])
            if h == 0:
                continue
            level = _series_level(si, n_series)
            c0 = start + si * bar_w
            px[lay.axis_row - h:lay.axis_row, c0:c0 + bar_w] = np.maximum(
                px[lay.axis_row - h:lay.axis_row, c0:c0 + bar_w], level)


def _render_lines(px: np.ndarray, lay: _Layout, spec: ChartSpec) -> None:
    n_cat = len(spec.x_labels)
    cols = [_category_center(lay, spec, i) for i in range(n_cat)]
    for si, series in enumerate(spec.series):
        level = _series_level(si, len(spec.series))
        rows = [lay.row_of(v) for v in series.y]
        for i in range(n_cat - 1):
            _draw_segment(px, rows[i], cols[i], rows[i + 1], cols[i + 1], level)


def _render_scatter(px: np.ndarray, lay: _Layout, spec: ChartSpec) -> None:
    for si, series in enumerate(spec.series):
        level = _series_level(si, len(spec.series))
        for xv, yv in zip(series.x, series.y):
            r, c = lay.row_of(yv), lay.col_of(xv)
            r0 = max(lay.plot_top, r - 1)
            r1 = min(lay.plot_bot, r + 1)
            c0 = max(lay.plot_left, c - 1)
            c1 = min(lay.plot_right, c + 1)
            px[r0:r1 + 1, c0:c1 + 1] = np.maximum(px[r0:r1 + 1, c0:c1 + 1], level)


def _render_pie(px: np.ndarray, lay: _Layout, spec: ChartSpec) -> None:
    values = spec.series[0].y
    total = float(sum(values))
    bounds = np.cumsum([v / total for v in values])
    cy = (lay.height - 1) / 2.0
    cx = (lay.width - 1) / 2.0
    radius = min(lay.height, lay.width) / 2.0 - 3.0
    k = len(values)
    rr, cc = np.meshgrid(np.arange(lay.height), np.arange(lay.width), indexing="ij")
    dy = rr - cy
    dx = cc - cx
    dist = np.hypot(dx, dy)
    # clockwise angle from 12 o'clock, as a fraction of the full turn
    frac = (np.arctan2(dx, -dy) / (2.0 * math.pi)) % 1.0
    idx = np.searchsorted(bounds[:-1], frac.ravel(), side="right").reshape(frac.shape)
    levels = 0.3 + 0.6 * (idx + 1) / k
    px[dist < radius - 0.6] = levels[dist < radius - 0.6]
    px[(dist >= radius - 0.6) & (dist <= radius + 0.6)] = 1.0  # rim
