"""Measurement datasets and size normalisation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import NonFiniteInput
from ..model.types import QualityModel


@dataclass(frozen=True)
class MeasurementDataset:
    """Measure values for one system.

    ``raw`` maps measure ids to values (``None`` or absent = missing).
    ``derived`` maps binding keys (``measure`` or ``measure@normaliser``) to the
    values the evaluations consume; it is ``None`` until :func:`normalise` ran.
    """

    system_id: str
    raw: dict[str, float | None] = field(default_factory=dict)
    derived: dict[str, float | None] | None = None
    warnings: tuple[str, ...] = ()


def normalise(dataset: MeasurementDataset, model: QualityModel) -> MeasurementDataset:
    for mid, v in dataset.raw.items():
        if v is not None and not math.isfinite(v):
            raise NonFiniteInput(f"{dataset.system_id}: value of {mid} is {v!r}")

    derived: dict[str, float | None] = {}
    warnings = list(dataset.warnings)
    for _, b in model.bindings():
        if b.key in derived:
            continue
        num = dataset.raw.get(b.measure)
        if b.normaliser is None:
            derived[b.key] = num
            continue
        den = dataset.raw.get(b.normaliser)
        if num is None or den is None:
            derived[b.key] = None
        elif den == 0:
            derived[b.key] = None
            warnings.append(f"normaliser {b.normaliser} is 0; {b.key} treated as missing")
        else:
            derived[b.key] = num / den
    return replace(dataset, derived=dict(sorted(derived.items())), warnings=tuple(warnings))
