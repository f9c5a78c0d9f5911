"""Corpus records: build, stage, persist and reload chart-summary examples.

One record per line in the corpus file (UTF-8, LF, compact JSON with sorted
keys so identical corpora are byte-identical). Images are never stored:
rendering is deterministic from (spec, resolution), so pixels are recreated
on demand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .. import textnorm
from ..numcore import PrngStream
from .facts import derive_facts
from .spec import ChartSpec, NamedSeries, validate_spec
from .texts import generate_texts

INSTRUCTION_TEMPLATES = (
    "Provide a concise summary of the key insights presented in this chart, "
    "considering its type, axes, and data trends.",
    "Generate a chart summary by first identifying the chart type, then "
    "describing the axes and scales, and finally highlighting the major "
    "trends and data points.",
    "Summarize the given chart in a step-by-step manner, starting with chart "
    "type recognition, followed by axis analysis, and concluding with a "
    "synthesis of key data findings.",
)

TYPE_RANK = {"bar": 0, "line": 0, "pie": 1, "scatter": 1}


class CorpusFormatError(ValueError):
    """Malformed corpus file; message carries the 1-based line number."""


class CorpusIntegrityError(ValueError):
    """Structurally parseable record that violates an invariant."""


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    spec: ChartSpec
    instruction_index: int
    reasoning: str
    summary: str
    stage: int

    @property
    def instruction(self) -> str:
        return INSTRUCTION_TEMPLATES[self.instruction_index]


def series_bin(n_series: int) -> int:
    if n_series <= 2:
        return 0
    if n_series <= 5:
        return 1
    return 2


def length_bin(summary: str) -> int:
    n = textnorm.token_count(summary)
    if n <= 20:
        return 0
    if n <= 40:
        return 1
    return 2


def complexity_stage(spec: ChartSpec, summary: str) -> int:
    """max(type rank, series bin, summary length bin), each in {0, 1, 2}."""
    return max(TYPE_RANK[spec.chart_kind], series_bin(len(spec.series)), length_bin(summary))


def make_record(spec: ChartSpec, record_id: str, instruction_index: int) -> CorpusRecord:
    facts = derive_facts(spec)
    reasoning, summary = generate_texts(spec, facts)
    return CorpusRecord(record_id, spec, instruction_index, reasoning, summary,
                        complexity_stage(spec, summary))


def build_corpus(n: int, seed: int) -> list[CorpusRecord]:
    """n records; record i depends only on (seed, i), so any subset or
    ordering of workers would produce identical records."""
    from .spec import sample_spec

    root = PrngStream(seed)
    records = []
    for i in range(n):
        rng = root.child(i)
        spec = sample_spec(rng)
        instruction_index = rng.randrange(len(INSTRUCTION_TEMPLATES))
        records.append(make_record(spec, f"c{seed:x}-{i:06d}", instruction_index))
    return records


def validate_record(record: CorpusRecord) -> None:
    validate_spec(record.spec)
    if not 0 <= record.instruction_index < len(INSTRUCTION_TEMPLATES):
        raise CorpusIntegrityError(f"record {record.id}: bad instruction index")
    if textnorm.sentence_count(record.reasoning) != 3:
        raise CorpusIntegrityError(f"record {record.id}: reasoning must be exactly 3 sentences")
    if not 1 <= textnorm.sentence_count(record.summary) <= 3:
        raise CorpusIntegrityError(f"record {record.id}: summary must be 1-3 sentences")
    expected = complexity_stage(record.spec, record.summary)
    if record.stage != expected:
        raise CorpusIntegrityError(
            f"record {record.id}: stage {record.stage} does not match recomputed {expected}")


def _record_to_obj(r: CorpusRecord) -> dict:
    series = []
    for s in r.spec.series:
        entry = {"name": s.name, "y": list(s.y)}
        if s.x is not None:
            entry["x"] = list(s.x)
        series.append(entry)
    return {
        "id": r.id,
        "chart_kind": r.spec.chart_kind,
        "series": series,
        "x_labels": list(r.spec.x_labels),
        "seed": r.spec.seed,
        "instruction_index": r.instruction_index,
        "reasoning": r.reasoning,
        "summary": r.summary,
        "stage": r.stage,
    }


def _record_from_obj(obj: dict) -> CorpusRecord:
    series = tuple(
        NamedSeries(s["name"], tuple(s["y"]), tuple(s["x"]) if "x" in s else None)
        for s in obj["series"]
    )
    spec = ChartSpec(obj["chart_kind"], series, tuple(obj["x_labels"]), obj["seed"])
    return CorpusRecord(obj["id"], spec, obj["instruction_index"],
                        obj["reasoning"], obj["summary"], obj["stage"])


def save_corpus(records, path) -> None:
    for r in records:
        validate_record(r)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(_record_to_obj(r), sort_keys=True,
                                separators=(",", ":"), ensure_ascii=True))
            fh.write("\n")


def load_corpus(path) -> list[CorpusRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                record = _record_from_obj(obj)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusFormatError(f"line {lineno}: malformed record ({exc})") from exc
            try:
                validate_record(record)
            except (CorpusIntegrityError, ValueError) as exc:
                raise CorpusIntegrityError(f"line {lineno}: {exc}") from exc
            records.append(record)
    return records
