"""School-grade interpretation of utilities (1 = best, 6 = worst)."""

from __future__ import annotations

from dataclasses import dataclass

# lower utility bound of each band; anything below the last bound is band 6
BAND_FLOORS = ((0.98, 1), (0.96, 2), (0.94, 3), (0.92, 4), (0.90, 5))


@dataclass(frozen=True)
class GradeResult:
    continuous: float
    band: int

    def to_dict(self) -> dict[str, float | int]:
        return {"continuous": self.continuous, "band": self.band}


def grade_band(u: float) -> int:
    for floor, band in BAND_FLOORS:
        if u >= floor:
            return band
    return 6


def continuous_grade(u: float) -> float:
    # piecewise-linear extension of the bands: one grade per 0.02 below 0.98
    return min(6.0, max(1.0, 1.0 + (0.98 - u) / 0.02))


def grade(u: float) -> GradeResult:
    return GradeResult(continuous_grade(u), grade_band(u))


def interpret(interval) -> tuple[GradeResult, GradeResult]:
    """Grades for the worst-case (``lo``) and best-case (``hi``) utility."""
    return grade(interval.lo), grade(interval.hi)
