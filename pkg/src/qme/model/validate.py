"""Structural validation of a linked model.

Errors block assessment; warnings are advisory.

Errors
  E1 impact-kinds          impact must go from a product factor to a quality aspect
  E2 refinement            refines across kinds, or a cycle in the factor/entity hierarchies
  E3 weights               weight spec does not resolve to weights in [0,1] summing to 1
  E4 binding-parameters    utility thresholds min <= max and finite; coverage in (0, 1]
  E5 normaliser            normaliser is not a normalisation measure, or a normalisation
                           measure is itself normalised
  E6 aspect-entity         quality aspect not attached to the product entity
  E7 evaluation-structure  evaluation children do not match the owner's kind/edges
  E8 instrument            tool instrument without a tool name
Warnings
  W1 unreferenced          element referenced by nothing
  W2 unevaluated-factor    product factor with impacts but no evaluation
  W3 polarity              negative impact from a factor measured only by increasing utilities
  W4 implicit-evaluation   quality aspect with children but no evaluation (equal weights used)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Literal

from ..engine.weights import resolve_weights
from ..errors import QmeError
from .types import PRODUCT_FACTOR, QUALITY_ASPECT, QualityModel


@dataclass(frozen=True, order=True)
class Finding:
    level: Literal["error", "warning"]
    rule: str
    element: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"level": self.level, "rule": self.rule, "element": self.element, "message": self.message}


def errors(findings: list[Finding]) -> list[Finding]:
    return [f for f in findings if f.level == "error"]


def _cycle(graph: dict[str, tuple[str, ...]]) -> list[str] | None:
    try:
        TopologicalSorter(graph).prepare()
    except CycleError as exc:
        return list(exc.args[1])
    return None


def aspect_children(model: QualityModel, aspect: str) -> list[str]:
    """Default children of a quality aspect: refining sub-aspects, then impacting factors."""
    subs = [f.id for f in model.sub_factors(aspect) if f.kind == QUALITY_ASPECT]
    srcs = [i.source for i in model.impacts_on(aspect)]
    return sorted(subs) + sorted(s for s in srcs if s not in subs)


def validate(model: QualityModel) -> list[Finding]:
    out: list[Finding] = []

    def err(rule: str, element: str, msg: str) -> None:
        out.append(Finding("error", rule, element, msg))

    def warn(rule: str, element: str, msg: str) -> None:
        out.append(Finding("warning", rule, element, msg))

    factors = model.factors

    for imp in model.impacts:
        s, t = factors[imp.source], factors[imp.target]
        if s.kind != PRODUCT_FACTOR or t.kind != QUALITY_ASPECT:
            err("E1", imp.id, f"impact must go product_factor -> quality_aspect, got {s.kind} -> {t.kind}")

    for f in factors.values():
        for p in f.refines:
            if factors[p].kind != f.kind:
                err("E2", f.id, f"{f.kind} refines {factors[p].kind} {p}")
    for label, graph in (
        ("factor refinement", {f.id: f.refines for f in factors.values()}),
        ("entity is-a", {e.id: e.is_a for e in model.entities.values()}),
        ("entity part-of", {e.id: e.part_of for e in model.entities.values()}),
    ):
        cyc = _cycle(graph)
        if cyc:
            err("E2", cyc[0], f"{label} cycle: {' -> '.join(cyc)}")

    root = factors[model.root_aspect]
    if root.kind != QUALITY_ASPECT:
        err("E6", root.id, "root must be a quality aspect")
    for f in factors.values():
        if f.kind == QUALITY_ASPECT and f.entity != root.entity:
            err("E6", f.id, f"quality aspect entity {f.entity} is not the product entity {root.entity}")

    for ev in model.evaluations.values():
        owner = factors[ev.owner]
        n = len(ev.child_ids)
        if owner.kind == PRODUCT_FACTOR:
            if ev.children or not ev.bindings:
                err("E7", ev.owner, "product-factor evaluation must list measure bindings only")
        else:
            if ev.bindings or not ev.children:
                err("E7", ev.owner, "quality-aspect evaluation must list child factors only")
            allowed = set(aspect_children(model, ev.owner))
            for c in ev.children:
                if c not in allowed:
                    err("E7", ev.owner, f"child {c} neither impacts nor refines {ev.owner}")
        if len(set(ev.child_ids)) != n:
            err("E7", ev.owner, "evaluation lists a child more than once")
        if n:
            try:
                resolve_weights(ev.weights, n)
            except QmeError as exc:
                err("E3", ev.owner, str(exc))
        for b in ev.bindings:
            u = b.utility
            if not (math.isfinite(u.min) and math.isfinite(u.max)) or u.min > u.max:
                err("E4", ev.owner, f"utility thresholds for {b.measure} need min <= max, got ({u.min}, {u.max})")
            if not (0.0 < b.coverage <= 1.0):
                err("E4", ev.owner, f"coverage of {b.measure} must be in (0, 1], got {b.coverage}")
            if b.normaliser and not model.measures[b.normaliser].is_normalisation_measure:
                err("E5", ev.owner, f"{b.normaliser} is used as normaliser but is not a normalisation measure")
            if b.normaliser and model.measures[b.measure].is_normalisation_measure:
                err("E5", ev.owner, f"normalisation measure {b.measure} must not be normalised")

    for i in model.instruments.values():
        if i.source == "tool" and not i.tool_name:
            err("E8", i.id, "tool instrument needs a tool_name")

    # warnings
    used_measures = {b.measure for _, b in model.bindings()} | {
        b.normaliser for _, b in model.bindings() if b.normaliser
    }
    for m in model.measures.values():
        if m.id not in used_measures:
            warn("W1", m.id, "measure is neither bound to a factor nor used as normaliser")
    used_entities = {f.entity for f in factors.values()}
    for e in model.entities.values():
        used_entities.update(e.is_a)
        used_entities.update(e.part_of)
    for e in model.entities.values():
        if e.id not in used_entities:
            warn("W1", e.id, "entity is not referenced by any factor or entity")
    linked: set[str] = {model.root_aspect}
    for f in factors.values():
        if f.refines:
            linked.add(f.id)
            linked.update(f.refines)
    for imp in model.impacts:
        linked.update((imp.source, imp.target))
    for ev in model.evaluations.values():
        linked.add(ev.owner)
        linked.update(ev.children)
    for f in factors.values():
        if f.id not in linked:
            warn("W1", f.id, "factor has no refinement, impact or evaluation links")

    for f in factors.values():
        has_impacts = bool(model.impacts_from(f.id))
        if f.kind == PRODUCT_FACTOR and has_impacts and f.id not in model.evaluations:
            warn("W2", f.id, "product factor has impacts but no evaluation")
        if f.kind == QUALITY_ASPECT and f.id not in model.evaluations and aspect_children(model, f.id):
            warn("W4", f.id, "quality aspect has no evaluation; children get equal weights")

    for imp in model.impacts:
        if imp.polarity != "negative":
            continue
        ev = model.evaluations.get(imp.source)
        if ev and ev.bindings and all(b.utility.increasing for b in ev.bindings):
            warn("W3", imp.id, "negative impact, but every utility function of the source is increasing")

    out.sort(key=lambda f: (f.level != "error", f.rule, f.element, f.message))
    return out
