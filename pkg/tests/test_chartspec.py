import pytest

from chartlab.chartgen import (
    ChartSpec,
    NamedSeries,
    SpecError,
    is_valid_spec,
    sample_spec,
    validate_spec,
)
from chartlab.numcore import PrngStream


def test_same_seed_same_spec():
    a = sample_spec(PrngStream(1))
    b = sample_spec(PrngStream(1))
    assert a == b


def test_stage0_filter_forces_simple_structure():
    for seed in range(50):
        spec = sample_spec(PrngStream(seed), stage_filter=0)
        assert spec.chart_kind in ("bar", "line")
        assert len(spec.series) <= 2


def test_stage1_filter_bounds_series():
    for seed in range(50):
        spec = sample_spec(PrngStream(seed), stage_filter=1)
        assert len(spec.series) <= 5


def test_invalid_stage_filter():
    with pytest.raises(ValueError):
        sample_spec(PrngStream(0), stage_filter=5)


def test_validator_sweep_over_many_samples():
    # every sampled spec passes the invariant validator
    for seed in range(10_000):
        spec = sample_spec(PrngStream(seed))
        assert is_valid_spec(spec), f"seed {seed} produced invalid spec"


def test_validator_rejects_bad_specs():
    with pytest.raises(SpecError):
        validate_spec(ChartSpec("pie", (NamedSeries("alpha", (5, 0, 3)),), (), 0))
    with pytest.raises(SpecError):
        validate_spec(ChartSpec("bar", (NamedSeries("alpha", (5, 3)),), ("jan",), 0))
    with pytest.raises(SpecError):
        validate_spec(ChartSpec("line", (NamedSeries("alpha", (5, 101)),), ("jan", "feb"), 0))
    with pytest.raises(SpecError):
        validate_spec(ChartSpec("scatter", (NamedSeries("alpha", (5, 3), (1,)),), (), 0))
    with pytest.raises(SpecError):
        validate_spec(ChartSpec("donut", (NamedSeries("alpha", (5, 3)),), (), 0))


def test_pie_specs_have_single_positive_series():
    seen_pie = False
    for seed in range(200):
        spec = sample_spec(PrngStream(seed))
        if spec.chart_kind != "pie":
            continue
        seen_pie = True
        assert len(spec.series) == 1
        assert all(v > 0 for v in spec.series[0].y)
        assert 2 <= len(spec.series[0].y) <= 8
    assert seen_pie
