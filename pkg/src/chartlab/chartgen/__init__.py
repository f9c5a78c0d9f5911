"""Synthetic chart corpus: specs, rendering, facts, texts, persistence."""

from .corpus import (
    INSTRUCTION_TEMPLATES,
    CorpusFormatError,
    CorpusIntegrityError,
    CorpusRecord,
    build_corpus,
    complexity_stage,
    load_corpus,
    make_record,
    save_corpus,
    series_bin,
)
from .facts import Fact, FactList, derive_facts, dominant_series, largest_slice_share, trend_of
from .render import (
    DIGIT_FONT,
    GLYPH_GAP,
    GLYPH_H,
    GLYPH_W,
    RenderedChart,
    SizingError,
    TickLabel,
    render_chart,
    tick_annotations,
)
from .spec import (
    CHART_KINDS,
    CATEGORY_LABELS,
    SERIES_NAMES,
    ChartSpec,
    NamedSeries,
    SpecError,
    is_valid_spec,
    sample_spec,
    validate_spec,
)
from .texts import generate_texts

__all__ = [
    "INSTRUCTION_TEMPLATES",
    "CorpusFormatError",
    "CorpusIntegrityError",
    "CorpusRecord",
    "build_corpus",
    "complexity_stage",
    "load_corpus",
    "make_record",
    "save_corpus",
    "series_bin",
    "Fact",
    "FactList",
    "derive_facts",
    "dominant_series",
    "largest_slice_share",
    "trend_of",
    "DIGIT_FONT",
    "GLYPH_GAP",
    "GLYPH_H",
    "GLYPH_W",
    "RenderedChart",
    "SizingError",
    "TickLabel",
    "render_chart",
    "tick_annotations",
    "CHART_KINDS",
    "CATEGORY_LABELS",
    "SERIES_NAMES",
    "ChartSpec",
    "NamedSeries",
    "SpecError",
    "is_valid_spec",
    "sample_spec",
    "validate_spec",
    "generate_texts",
]
