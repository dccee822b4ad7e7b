"""Exports of assessment results: chart data and the HTML report."""

from .charts import (
    KiviatAxis,
    KiviatSeries,
    SunburstNode,
    band_colour,
    kiviat_dumps,
    sunburst_dumps,
    to_kiviat,
    to_sunburst,
)
from .html import render_html

__all__ = [
    "KiviatAxis",
    "KiviatSeries",
    "SunburstNode",
    "band_colour",
    "kiviat_dumps",
    "render_html",
    "sunburst_dumps",
    "to_kiviat",
    "to_sunburst",
]
