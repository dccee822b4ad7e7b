"""Turning exported tool findings and metric tables into measure values."""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .engine.normalise import MeasurementDataset
from .errors import DuplicateMeasureValue, MalformedRecord
from .model.types import QualityModel

FINDINGS_HEADER = ["tool", "rule", "path", "line", "message"]
METRICS_HEADER = ["measure_id", "value"]


@dataclass(frozen=True)
class FindingRecord:
    tool: str
    rule_id: str
    path: str = ""
    line: int | None = None
    message: str | None = None


@dataclass(frozen=True)
class MetricRecord:
    measure_id: str
    value: float
    row: int | None = None


@dataclass
class PartialDataset:
    """Measure values from one source, before merging."""

    source: str
    raw: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    matched: int = 0
    unmatched: int = 0


def _rows(path: Path, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise MalformedRecord(str(path), 1, f"expected header {','.join(header)}")
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MalformedRecord(str(path), row_no, f"expected {len(header)} fields, got {len(row)}")
            yield row_no, row


def read_findings(path: str | Path) -> Iterator[FindingRecord]:
    path = Path(path)
    for row_no, (tool, rule, fpath, line, message) in _rows(path, FINDINGS_HEADER):
        tool, rule = tool.strip(), rule.strip()
        if not tool or not rule:
            raise MalformedRecord(str(path), row_no, "tool and rule must be non-empty")
        try:
            line_no = int(line) if line.strip() else None
        except ValueError:
            raise MalformedRecord(str(path), row_no, f"line {line!r} is not an integer") from None
        yield FindingRecord(tool, rule, fpath, line_no, message or None)


def read_metrics(path: str | Path) -> Iterator[MetricRecord]:
    path = Path(path)
    for row_no, (measure, value) in _rows(path, METRICS_HEADER):
        measure = measure.strip()
        if not measure:
            raise MalformedRecord(str(path), row_no, "empty measure_id")
        try:
            v = float(value)
        except ValueError:
            raise MalformedRecord(str(path), row_no, f"value {value!r} is not a number") from None
        if not math.isfinite(v):
            raise MalformedRecord(str(path), row_no, f"value {value!r} is not finite")
        yield MetricRecord(measure, v, row_no)


def ingest_findings(
    findings: Iterable[FindingRecord], model: QualityModel, tools_ran: Iterable[str] = ()
) -> PartialDataset:
    """Count findings per measure via the model's tool instruments.

    Instruments match on ``(tool_name, rule_id)``, case-sensitively.  A finding
    matching instruments of several measures counts once for each of them.
    Findings-count measures instrumented by a tool listed in ``tools_ran`` start
    at 0, so a clean run yields 0 rather than a missing value.
    """
    index: dict[tuple[str, str], set[str]] = defaultdict(set)
    by_tool: dict[str, set[str]] = defaultdict(set)
    for ins in model.instruments.values():
        if ins.source == "tool" and ins.tool_name and ins.rule_id:
            index[(ins.tool_name, ins.rule_id)].add(ins.measure)
            by_tool[ins.tool_name].add(ins.measure)

    out = PartialDataset(source="findings")
    counts: Counter[str] = Counter()
    for tool in tools_ran:
        for m in by_tool.get(tool, ()):
            if model.measures[m].value_kind == "findings_count":
                counts[m] += 0
    misses: Counter[tuple[str, str]] = Counter()
    for f in findings:
        measures = index.get((f.tool, f.rule_id))
        if measures:
            out.matched += 1
            for m in measures:
                counts[m] += 1
        else:
            out.unmatched += 1
            misses[(f.tool, f.rule_id)] += 1
    out.raw = {m: float(counts[m]) for m in sorted(counts)}
    out.warnings = [
        f"{n} finding(s) of {tool}/{rule} matched no instrument"
        for (tool, rule), n in sorted(misses.items())
    ]
    return out


def ingest_metrics(metrics: Iterable[MetricRecord], model: QualityModel) -> PartialDataset:
    out = PartialDataset(source="metrics")
    unknown: list[str] = []
    for rec in metrics:
        if rec.measure_id not in model.measures:
            if rec.measure_id not in unknown:
                unknown.append(rec.measure_id)
            continue
        if rec.measure_id in out.raw:
            where = f" (row {rec.row})" if rec.row else ""
            raise DuplicateMeasureValue(rec.measure_id, where)
        if model.measures[rec.measure_id].value_kind == "findings_count" and (
            rec.value < 0 or rec.value != int(rec.value)
        ):
            raise MalformedRecord("metrics", rec.row or 0, f"{rec.measure_id} needs a non-negative integer count")
        out.raw[rec.measure_id] = rec.value
        out.matched += 1
    out.unmatched = len(unknown)
    out.warnings = [f"metric for unknown measure {m} ignored" for m in unknown]
    return out


def merge(system_id: str, parts: Iterable[PartialDataset]) -> MeasurementDataset:
    """Combine partial datasets; a measure may get its value from one source only."""
    raw: dict[str, float] = {}
    origin: dict[str, str] = {}
    warnings: list[str] = []
    for part in parts:
        for m, v in part.raw.items():
            if m in raw:
                raise DuplicateMeasureValue(m, f" (from {origin[m]} and {part.source})")
            raw[m] = v
            origin[m] = part.source
        warnings.extend(part.warnings)
    return MeasurementDataset(system_id=system_id, raw=dict(sorted(raw.items())), warnings=tuple(warnings))
