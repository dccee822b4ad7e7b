"""Utility-threshold calibration against a benchmark corpus.

Thresholds come from quartile fences.  When fewer than five benchmark systems
have a strictly positive value, the measure gets the jump function
``(0, 1e-8)``.  Otherwise ``max`` is the largest value not above
``Q3(nonzero) + 1.5 * IQR(all)`` and ``min`` the smallest value not below
``Q1(nonzero) - 1.5 * IQR(all)``.  Quartiles use linear interpolation between
order statistics at position ``1 + (n - 1) * q`` (numpy's default method).
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateMeasureValue, EmptyInput, MalformedRecord, NonFiniteInput
from .model.link import link
from .model.types import QualityModel, UtilityFunction

JUMP_MAX = 0.00000001
MIN_POSITIVE = 5
FENCE_FACTOR = 1.5


@dataclass(frozen=True)
class Thresholds:
    min: float
    max: float


@dataclass(frozen=True)
class CalibrationStats:
    n: int
    nonzero_count: int
    positive_count: int
    q1: float | None  # quartiles of the nonzero values (the fences' anchors)
    q3: float | None
    iqr: float  # inter-quartile range of all values
    q1_all: float
    q3_all: float
    lower_fence: float | None
    upper_fence: float | None
    min: float
    max: float
    branch: str  # "jump" | "linear"
    note: str = "fences anchor on quartiles of nonzero values but use the IQR of all values"

    def to_dict(self) -> dict:
        return asdict(self)


def _percentile(xs: Sequence[float], q: float) -> float:
    # xs sorted, non-empty
    h = (len(xs) - 1) * q
    i = math.floor(h)
    if i + 1 >= len(xs):
        return xs[-1]
    return xs[i] + (h - i) * (xs[i + 1] - xs[i])


def _clean(values: Iterable[float | None]) -> list[float]:
    xs = [float(v) for v in values if v is not None]
    if not xs:
        raise EmptyInput("no values to calibrate")
    for v in xs:
        if not math.isfinite(v):
            raise NonFiniteInput(f"non-finite benchmark value {v!r}")
    xs.sort()
    return xs


def quartiles(values: Iterable[float]) -> tuple[float, float]:
    """25th and 75th percentiles.

    >>> quartiles([1, 2, 3, 4])
    (1.75, 3.25)
    """
    xs = _clean(values)
    return _percentile(xs, 0.25), _percentile(xs, 0.75)


def calibration_stats(values: Iterable[float | None]) -> CalibrationStats:
    """Thresholds for one measure plus the statistics behind them.

    Missing values (``None``) are dropped before anything is computed.
    """
    xs = _clean(values)
    nonzero = [v for v in xs if v != 0]
    positive = sum(1 for v in xs if v > 0)
    q1_all, q3_all = _percentile(xs, 0.25), _percentile(xs, 0.75)
    iqr = q3_all - q1_all
    q1 = _percentile(nonzero, 0.25) if nonzero else None
    q3 = _percentile(nonzero, 0.75) if nonzero else None
    common = dict(
        n=len(xs), nonzero_count=len(nonzero), positive_count=positive,
        q1=q1, q3=q3, iqr=iqr, q1_all=q1_all, q3_all=q3_all,
    )
    if positive < MIN_POSITIVE:
        return CalibrationStats(
            **common, lower_fence=None, upper_fence=None, min=0.0, max=JUMP_MAX, branch="jump"
        )
    # nonzero has at least 5 entries here, so the nonzero quartiles exist
    upper = q3 + FENCE_FACTOR * iqr
    lower = q1 - FENCE_FACTOR * iqr
    hi = max(v for v in xs if v <= upper)
    lo = min(v for v in xs if v >= lower)
    return CalibrationStats(
        **common, lower_fence=lower, upper_fence=upper, min=lo, max=hi, branch="linear"
    )


def calibrate_thresholds(values: Iterable[float | None]) -> Thresholds:
    s = calibration_stats(values)
    return Thresholds(s.min, s.max)


# -- corpus --------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkCorpus:
    """Normalised benchmark values keyed by binding key (``measure`` or ``measure@normaliser``)."""

    systems: tuple[str, ...]
    values: dict[str, tuple[float, ...]]
    provenance: str = ""


CORPUS_HEADER = ["system_id", "measure_id", "value"]


def read_corpus(path: str | Path) -> BenchmarkCorpus:
    """Read a ``system_id,measure_id,value`` CSV file.

    An empty value marks a missing observation and is skipped.
    """
    path = Path(path)
    systems: set[str] = set()
    values: dict[str, list[float]] = defaultdict(list)
    seen: set[tuple[str, str]] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CORPUS_HEADER:
            raise MalformedRecord(str(path), 1, f"expected header {','.join(CORPUS_HEADER)}")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise MalformedRecord(str(path), row_no, f"expected 3 fields, got {len(row)}")
            system, measure, raw = (c.strip() for c in row)
            if not system or not measure:
                raise MalformedRecord(str(path), row_no, "empty system_id or measure_id")
            if (system, measure) in seen:
                raise DuplicateMeasureValue(measure, f" for system {system!r} ({path}:{row_no})")
            seen.add((system, measure))
            systems.add(system)
            if raw == "":
                continue
            try:
                v = float(raw)
            except ValueError:
                raise MalformedRecord(str(path), row_no, f"value {raw!r} is not a number") from None
            if not math.isfinite(v):
                raise MalformedRecord(str(path), row_no, f"value {raw!r} is not finite")
            values[measure].append(v)
    return BenchmarkCorpus(
        systems=tuple(sorted(systems)),
        values={k: tuple(v) for k, v in sorted(values.items())},
        provenance=str(path),
    )


# -- model calibration -----------------------------------------------------------------


@dataclass
class CalibrationReport:
    stats: dict[str, CalibrationStats] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "measures": {k: s.to_dict() for k, s in sorted(self.stats.items())},
            "warnings": list(self.warnings),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def calibrate_model(model: QualityModel, corpus: BenchmarkCorpus) -> tuple[QualityModel, CalibrationReport]:
    """Replace every binding's thresholds with corpus-derived ones.

    Bindings without corpus data keep their thresholds and produce a warning.
    The function direction (increasing/decreasing) is never changed.
    """
    report = CalibrationReport()
    seen: set[str] = set()
    for _, b in model.bindings():
        if b.key in seen:
            continue
        seen.add(b.key)
        vals = corpus.values.get(b.key)
        if not vals:
            report.warnings.append(f"no corpus data for {b.key}; thresholds unchanged")
            continue
        report.stats[b.key] = calibration_stats(vals)

    def recalibrated(ev):
        if not any(b.key in report.stats for b in ev.bindings):
            return ev
        bindings = tuple(
            replace(
                b,
                utility=UtilityFunction(b.utility.shape, report.stats[b.key].min, report.stats[b.key].max),
            )
            if b.key in report.stats
            else b
            for b in ev.bindings
        )
        return replace(ev, bindings=bindings)

    modules = [replace(m, evaluations=tuple(recalibrated(e) for e in m.evaluations)) for m in model.modules]
    return link(modules), report
