"""Sunburst and Kiviat chart data derived from assessment results."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..engine.grades import grade_band
from ..engine.result import AssessmentResult, ChildTrace, FactorResult
from ..engine.utility import UtilityInterval
from ..errors import ModelMismatch

# band -> RGB anchors of the ramp; linear in between
_GREEN = (26, 152, 80)
_YELLOW = (255, 215, 0)
_RED = (215, 48, 39)


def band_colour(band: float) -> str:
    """Hex colour for a grade: green at 1, yellow at 3.5, red at 6."""
    b = min(6.0, max(1.0, float(band)))
    if b <= 3.5:
        a, z, t = _GREEN, _YELLOW, (b - 1.0) / 2.5
    else:
        a, z, t = _YELLOW, _RED, (b - 3.5) / 2.5
    rgb = (round(x + (y - x) * t) for x, y in zip(a, z))
    return "#" + "".join(f"{c:02x}" for c in rgb)


@dataclass(frozen=True)
class SunburstNode:
    factor: str
    label: str
    kind: str  # quality_aspect | product_factor | measure
    angle_fraction: float
    grade_band: int
    utility: UtilityInterval
    children: tuple[SunburstNode, ...] = ()

    @property
    def colour(self) -> str:
        return band_colour(self.grade_band)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "factor": self.factor,
            "label": self.label,
            "kind": self.kind,
            "angle_fraction": self.angle_fraction,
            "grade_band": self.grade_band,
            "colour": self.colour,
            "utility": {"lo": self.utility.lo, "hi": self.utility.hi},
            "children": [c.to_dict() for c in self.children],
        }


def to_sunburst(result: AssessmentResult) -> SunburstNode:
    """Tree mirroring the result trace, measures included as leaves.

    The angle fraction of a node is its weight within its parent, so the
    fractions of siblings sum to 1.  Colour follows the worst-case band.
    """

    def measure_leaf(c: ChildTrace) -> SunburstNode:
        return SunburstNode(c.id, c.id, "measure", c.weight, grade_band(c.utility.lo), c.utility)

    def node(fr: FactorResult, fraction: float, path: frozenset[str]) -> SunburstNode:
        kids = []
        for c in fr.children:
            if c.kind == "measure":
                kids.append(measure_leaf(c))
            elif c.id in result.factors and c.id not in path:
                kids.append(node(result.factors[c.id], c.weight, path | {c.id}))
        return SunburstNode(
            fr.factor, fr.name or fr.factor, fr.kind, fraction, fr.grade[0].band, fr.utility, tuple(kids)
        )

    return node(result.root, 1.0, frozenset({result.root_aspect}))


@dataclass(frozen=True)
class KiviatAxis:
    factor: str
    label: str
    utility: float  # worst case
    utility_hi: float


@dataclass(frozen=True)
class KiviatSeries:
    system_id: str
    model_digest: str
    root_utility: UtilityInterval
    root_band: int
    root_grade: float
    axes: tuple[KiviatAxis, ...] = field(default=())

    @property
    def axis_ids(self) -> tuple[str, ...]:
        return tuple(a.factor for a in self.axes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "system_id": self.system_id,
            "model_digest": self.model_digest,
            "root_utility": {"lo": self.root_utility.lo, "hi": self.root_utility.hi},
            "root_band": self.root_band,
            "root_grade": self.root_grade,
            "axes": [
                {"factor": a.factor, "label": a.label, "utility": a.utility, "utility_hi": a.utility_hi}
                for a in self.axes
            ],
        }


def to_kiviat(results: Sequence[AssessmentResult]) -> list[KiviatSeries]:
    """One series per result over the root aspect's direct sub-factors.

    All results must come from the same model, otherwise the axes would not
    line up; a differing model digest raises :class:`ModelMismatch`.
    """
    if not results:
        raise ValueError("no results to compare")
    first = results[0]
    for r in results[1:]:
        if r.model_digest != first.model_digest or r.root_aspect != first.root_aspect:
            raise ModelMismatch(
                f"{r.system_id} was assessed with model {r.model_digest}, "
                f"{first.system_id} with {first.model_digest}"
            )
    series = []
    for r in results:
        axes = []
        for c in r.root.children:
            if c.kind != "factor":
                continue
            fr = r.factors.get(c.id)
            label = fr.name if fr and fr.name else c.id
            axes.append(KiviatAxis(c.id, label, c.utility.lo, c.utility.hi))
        lo_grade = r.root_grade[0]
        series.append(
            KiviatSeries(r.system_id, r.model_digest, r.root.utility, lo_grade.band, lo_grade.continuous, tuple(axes))
        )
    return series


def kiviat_dumps(series: Sequence[KiviatSeries]) -> str:
    return json.dumps({"series": [s.to_dict() for s in series]}, indent=2, sort_keys=True) + "\n"


def sunburst_dumps(root: SunburstNode) -> str:
    return json.dumps(root.to_dict(), indent=2, sort_keys=True) + "\n"
