import hashlib
from dataclasses import replace

import pytest

from chartlab.chartgen import (
    CorpusFormatError,
    CorpusIntegrityError,
    INSTRUCTION_TEMPLATES,
    build_corpus,
    complexity_stage,
    load_corpus,
    save_corpus,
)
from chartlab.chartgen.spec import ChartSpec, NamedSeries


def bar_spec(values, seed=0):
    labels = ("jan", "feb", "mar", "apr")[: len(values)]
    return ChartSpec("bar", (NamedSeries("alpha", tuple(values)),), labels, seed)


def test_save_load_roundtrip(tmp_path):
    records = build_corpus(25, seed=3)
    path = tmp_path / "c.corpus"
    save_corpus(records, path)
    loaded = load_corpus(path)
    assert loaded == records


def test_empty_corpus_roundtrip(tmp_path):
    path = tmp_path / "empty.corpus"
    save_corpus([], path)
    assert load_corpus(path) == []


def test_order_preserved_hash_compare(tmp_path):
    records = build_corpus(1000, seed=11)
    path = tmp_path / "big.corpus"
    save_corpus(records, path)
    digest1 = hashlib.sha256(path.read_bytes()).hexdigest()
    save_corpus(load_corpus(path), path)
    digest2 = hashlib.sha256(path.read_bytes()).hexdigest()
    assert digest1 == digest2
    assert [r.id for r in load_corpus(path)] == [r.id for r in records]


def test_generation_deterministic_bytes(tmp_path):
    p1 = tmp_path / "a.corpus"
    p2 = tmp_path / "b.corpus"
    save_corpus(build_corpus(50, seed=21), p1)
    save_corpus(build_corpus(50, seed=21), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_corrupted_line_names_line_number(tmp_path):
    records = build_corpus(10, seed=1)
    path = tmp_path / "c.corpus"
    save_corpus(records, path)
    lines = path.read_text().splitlines()
    lines[6] = lines[6][: len(lines[6]) // 2]  # truncate line 7
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusFormatError, match="line 7"):
        load_corpus(path)


def test_tampered_stage_is_integrity_error(tmp_path):
    records = build_corpus(5, seed=2)
    bad = replace(records[2], stage=(records[2].stage + 1) % 3)
    path = tmp_path / "c.corpus"
    save_corpus(records[:2] + [records[2]] + records[3:], path)
    text = path.read_text().splitlines()
    text[2] = text[2].replace(f'"stage":{records[2].stage}', f'"stage":{bad.stage}')
    path.write_text("\n".join(text) + "\n")
    with pytest.raises(CorpusIntegrityError, match="stage"):
        load_corpus(path)


def test_records_expose_instruction_text():
    records = build_corpus(10, seed=4)
    for r in records:
        assert r.instruction == INSTRUCTION_TEMPLATES[r.instruction_index]
    assert len({r.instruction_index for r in records}) > 1


def test_stage_examples():
    short = "the bar chart shows alpha peaking at 9 and dipping to 1 with a flat trend."
    assert complexity_stage(bar_spec([9, 1]), short) == 0

    scatter = ChartSpec(
        "scatter",
        (NamedSeries("alpha", (1, 2), (3, 4)), NamedSeries("beta", (1, 2), (3, 4))),
        (), 0)
    assert complexity_stage(scatter, short) == 1  # type rank dominates

    six = ChartSpec(
        "line",
        tuple(NamedSeries(n, (1, 2)) for n in ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")),
        ("jan", "feb"), 0)
    assert complexity_stage(six, short) == 2  # more than 5 series

    long_summary = " ".join(["word"] * 45) + "."
    assert complexity_stage(bar_spec([9, 1]), long_summary) == 2
    mid_summary = " ".join(["word"] * 30) + "."
    assert complexity_stage(bar_spec([9, 1]), mid_summary) == 1


def test_stage_total_and_in_range():
    for r in build_corpus(200, seed=9):
        assert r.stage in (0, 1, 2)
        assert r.stage == complexity_stage(r.spec, r.summary)
