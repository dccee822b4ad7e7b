"""Small builders for hand-made test models."""

from __future__ import annotations

from typing import Any

from qme.model import link, module_from_dict


def module(mid: str = "m", **parts: Any) -> dict[str, Any]:
    return {"id": mid, **parts}


def build(*mods: dict[str, Any]):
    return link([module_from_dict(m, source=m["id"])[0] for m in mods])


def tiny(
    bindings: list[dict[str, Any]] | None = None,
    weights: dict[str, Any] | None = None,
    extra_measures: list[dict[str, Any]] | None = None,
) -> dict[str, Any]:
    """Root aspect <- one product factor <- the given bindings."""
    bindings = bindings or [
        {"measure": "x", "utility": {"shape": "linear_decreasing", "min": 0, "max": 10}}
    ]
    measures = [{"id": "loc", "name": "loc", "value_kind": "numeric", "is_normalisation_measure": True}]
    names = {b["measure"] for b in bindings}
    measures += [{"id": n, "name": n, "value_kind": "findings_count"} for n in sorted(names)]
    measures += extra_measures or []
    ev = {"owner": "pf", "measures": bindings}
    if weights:
        ev["weights"] = weights
    return module(
        "m",
        entities=[{"id": "product", "name": "product"}, {"id": "part", "name": "part", "part_of": ["product"]}],
        factors=[
            {"id": "q", "name": "Quality", "kind": "quality_aspect", "entity": "product"},
            {"id": "pf", "name": "PF", "kind": "product_factor", "entity": "part"},
        ],
        measures=measures,
        impacts=[{"source": "pf", "target": "q", "polarity": "negative"}],
        evaluations=[ev, {"owner": "q", "children": ["pf"]}],
    )
