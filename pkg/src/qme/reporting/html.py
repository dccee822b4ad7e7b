"""Self-contained static HTML report."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from jinja2 import Environment, PackageLoader, select_autoescape

from ..engine.result import AssessmentResult
from .charts import KiviatSeries, SunburstNode, band_colour, to_sunburst

RING = 48.0  # ring width in px
HOLE = 36.0


@dataclass(frozen=True)
class Arc:
    path: str
    colour: str
    title: str


def _pt(r: float, a: float) -> str:
    # angle 0 at twelve o'clock, clockwise
    return f"{r * math.sin(a):.3f},{-r * math.cos(a):.3f}"


def _sector(r0: float, r1: float, a0: float, a1: float) -> str:
    if a1 - a0 >= 2 * math.pi - 1e-9:
        # full ring: two half-annuli, since one arc cannot span 360 degrees
        mid = a0 + math.pi
        return _sector(r0, r1, a0, mid) + " " + _sector(r0, r1, mid, a0 + 2 * math.pi)
    large = 1 if a1 - a0 > math.pi else 0
    return (
        f"M{_pt(r0, a0)} L{_pt(r1, a0)} A{r1:.3f},{r1:.3f} 0 {large} 1 {_pt(r1, a1)} "
        f"L{_pt(r0, a1)} A{r0:.3f},{r0:.3f} 0 {large} 0 {_pt(r0, a0)} Z"
    )


def sunburst_arcs(root: SunburstNode) -> list[Arc]:
    arcs: list[Arc] = []

    def walk(node: SunburstNode, depth: int, a0: float, span: float) -> None:
        r0 = HOLE + depth * RING
        title = f"{node.label}: utility [{node.utility.lo:.4f}, {node.utility.hi:.4f}], band {node.grade_band}"
        if span > 1e-9:
            arcs.append(Arc(_sector(r0, r0 + RING, a0, a0 + span), node.colour, title))
        start = a0
        for c in node.children:
            walk(c, depth + 1, start, span * c.angle_fraction)
            start += span * c.angle_fraction

    walk(root, 0, 0.0, 2 * math.pi * root.angle_fraction)
    return arcs


def kiviat_polygons(series: Sequence[KiviatSeries], radius: float = 140.0) -> tuple[list[dict], list[dict]]:
    """Axis spokes and one polygon per series; empty when fewer than three axes."""
    if not series or len(series[0].axes) < 3:
        return [], []
    n = len(series[0].axes)
    spokes = []
    for i, ax in enumerate(series[0].axes):
        a = 2 * math.pi * i / n
        spokes.append({"end": _pt(radius, a), "label_at": _pt(radius + 14, a), "label": ax.label})
    polys = []
    for k, s in enumerate(series):
        pts = " ".join(_pt(radius * ax.utility, 2 * math.pi * i / n) for i, ax in enumerate(s.axes))
        hue = round(360 * k / max(1, len(series)))
        polys.append({"points": pts, "system_id": s.system_id, "stroke": f"hsl({hue},70%,40%)"})
    return spokes, polys


def _env() -> Environment:
    env = Environment(
        loader=PackageLoader("qme.reporting", "templates"),
        autoescape=select_autoescape(["html", "j2"]),
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )
    env.filters["colour"] = band_colour
    env.filters["u"] = lambda x: f"{x:.4f}"
    return env


def render_html(
    result: AssessmentResult,
    sunburst: SunburstNode | None = None,
    kiviat: Sequence[KiviatSeries] | None = None,
    *,
    generated_at: str | None = None,
) -> bytes:
    """Render the report; identical inputs give identical bytes.

    ``generated_at`` is printed only when given, so the default output has no
    timestamp.
    """
    sunburst = sunburst if sunburst is not None else to_sunburst(result)
    kiviat = list(kiviat or ())
    spokes, polys = kiviat_polygons(kiviat)
    # embedded data must not close the script element early
    data = result.dumps().replace("</", "<\\/")
    size = (HOLE + RING * sunburst.depth()) + 4
    html = _env().get_template("report.html.j2").render(
        r=result,
        root=result.root,
        factors=result.factors,
        arcs=sunburst_arcs(sunburst),
        size=size,
        kiviat=kiviat,
        spokes=spokes,
        polys=polys,
        data=data,
        generated_at=generated_at,
    )
    return html.encode("utf-8")
