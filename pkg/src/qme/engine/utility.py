"""Utility functions and utility intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..errors import NonFiniteInput
from ..model.types import UtilityFunction
from .weights import check_weights

__all__ = ["UtilityFunction", "UtilityInterval", "aggregate", "utility", "weighted_sum"]


def utility(fn: UtilityFunction, value: float) -> float:
    """Map a measure value to a utility in [0, 1].

    Values at or past ``max`` saturate first, so a function with ``min == max``
    is a step at that value (``>= max`` gives 0 when decreasing, 1 when
    increasing).
    """
    if not math.isfinite(value):
        raise NonFiniteInput(f"utility of non-finite value {value!r}")
    lo, hi = fn.min, fn.max
    if fn.increasing:
        if value >= hi:
            return 1.0
        if value <= lo:
            return 0.0
        return (value - lo) / (hi - lo)
    if value >= hi:
        return 0.0
    if value <= lo:
        return 1.0
    return (hi - value) / (hi - lo)


@dataclass(frozen=True)
class UtilityInterval:
    """Range of utilities consistent with the available data."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise ValueError(f"invalid utility interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, u: float) -> UtilityInterval:
        return cls(u, u)

    @classmethod
    def unknown(cls) -> UtilityInterval:
        return cls(0.0, 1.0)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, u: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= u <= self.hi + tol


def weighted_sum(pairs: list[tuple[tuple[float, float], float]]) -> tuple[float, float]:
    """Weighted sum of ``((lo, hi), weight)`` pairs, clamped to [0, 1].

    The sum is monotone in every child, so the endpoints are exact bounds.
    """
    lo = math.fsum(w * u[0] for u, w in pairs)
    hi = math.fsum(w * u[1] for u, w in pairs)
    return (min(1.0, max(0.0, lo)), min(1.0, max(0.0, hi)))


def aggregate(children: Iterable[tuple[UtilityInterval, float]]) -> UtilityInterval:
    items = list(children)
    check_weights([w for _, w in items])
    return UtilityInterval(*weighted_sum([((u.lo, u.hi), w) for u, w in items]))
