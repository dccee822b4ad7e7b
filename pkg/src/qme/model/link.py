"""Composition of modules into one linked quality model."""

from __future__ import annotations

from dataclasses import replace
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

from ..errors import (
    AmbiguousRoot,
    CyclicModuleDependency,
    DuplicateId,
    MissingRequires,
    UnresolvedReference,
)
from .types import QUALITY_ASPECT, QmModule, QualityModel

_ENTITY, _FACTOR, _MEASURE, _INSTRUMENT = "entity", "factor", "measure", "instrument"


def _canonical(module: QmModule) -> QmModule:
    by_id = lambda x: x.id  # noqa: E731
    return replace(
        module,
        requires=tuple(sorted(module.requires)),
        entities=tuple(sorted(module.entities, key=by_id)),
        factors=tuple(sorted(module.factors, key=by_id)),
        measures=tuple(sorted(module.measures, key=by_id)),
        instruments=tuple(sorted(module.instruments, key=by_id)),
        impacts=tuple(sorted(module.impacts, key=lambda i: (i.source, i.target))),
        evaluations=tuple(sorted(module.evaluations, key=lambda e: e.owner)),
    )


def requires_closure(modules: Iterable[QmModule]) -> dict[str, set[str]]:
    """Map each module id to the set of modules it may reference (itself included)."""
    direct = {m.id: set(m.requires) for m in modules}
    order = list(TopologicalSorter(direct).static_order())
    closure: dict[str, set[str]] = {}
    for mid in order:
        reach = {mid}
        for dep in direct.get(mid, ()):
            reach |= closure.get(dep, {dep})
        closure[mid] = reach
    return closure


def link(modules: Iterable[QmModule]) -> QualityModel:
    """Resolve all references across ``modules`` and return the linked model.

    Raises the first problem found, in canonical (module id, element id) order.
    """
    mods = sorted((_canonical(m) for m in modules), key=lambda m: m.id)

    seen_modules: set[str] = set()
    for m in mods:
        if m.id in seen_modules:
            raise DuplicateId(m.id)
        seen_modules.add(m.id)
    for m in mods:
        for dep in m.requires:
            if dep not in seen_modules:
                raise UnresolvedReference(dep, f"requires of module {m.id!r}")
    try:
        closure = requires_closure(mods)
    except CycleError as exc:
        raise CyclicModuleDependency(list(exc.args[1])) from None

    # id -> (kind, module)
    defs: dict[str, tuple[str, str]] = {}
    for m in mods:
        for kind, elems in (
            (_ENTITY, m.entities),
            (_FACTOR, m.factors),
            (_MEASURE, m.measures),
            (_INSTRUMENT, m.instruments),
        ):
            for e in elems:
                if e.id in defs:
                    raise DuplicateId(e.id, (defs[e.id][1], m.id))
                defs[e.id] = (kind, m.id)

    def resolve(ref: str, kind: str, referrer: str, module: str) -> None:
        hit = defs.get(ref)
        if hit is None or hit[0] != kind:
            raise UnresolvedReference(ref, f"{referrer} (expected {kind})")
        if hit[1] not in closure[module]:
            raise MissingRequires(ref, referrer, module, hit[1])

    impact_ids: set[str] = set()
    owners: set[str] = set()
    roots: set[str] = set()
    for m in mods:
        for e in m.entities:
            for r in (*e.is_a, *e.part_of):
                resolve(r, _ENTITY, f"entity {e.id}", m.id)
        for f in m.factors:
            resolve(f.entity, _ENTITY, f"factor {f.id}", m.id)
            for r in f.refines:
                resolve(r, _FACTOR, f"factor {f.id}", m.id)
        for i in m.instruments:
            resolve(i.measure, _MEASURE, f"instrument {i.id}", m.id)
        for imp in m.impacts:
            resolve(imp.source, _FACTOR, f"impact {imp.id}", m.id)
            resolve(imp.target, _FACTOR, f"impact {imp.id}", m.id)
            if imp.id in impact_ids:
                raise DuplicateId(imp.id)
            impact_ids.add(imp.id)
        for ev in m.evaluations:
            where = f"evaluation of {ev.owner}"
            resolve(ev.owner, _FACTOR, where, m.id)
            if ev.owner in owners:
                raise DuplicateId(where)
            owners.add(ev.owner)
            for b in ev.bindings:
                resolve(b.measure, _MEASURE, where, m.id)
                if b.normaliser:
                    resolve(b.normaliser, _MEASURE, where, m.id)
            for c in ev.children:
                resolve(c, _FACTOR, where, m.id)
        if m.root_aspect:
            resolve(m.root_aspect, _FACTOR, f"root_aspect of module {m.id!r}", m.id)
            roots.add(m.root_aspect)

    factors = {f.id: f for m in mods for f in m.factors}
    if len(roots) > 1:
        raise AmbiguousRoot(f"several modules declare a root aspect: {sorted(roots)}")
    if roots:
        (root,) = roots
    else:
        candidates = sorted(
            f.id for f in factors.values() if f.kind == QUALITY_ASPECT and not f.refines
        )
        if len(candidates) != 1:
            raise AmbiguousRoot(
                "cannot infer the root aspect; declare root_aspect in one module "
                f"(candidates: {candidates})"
            )
        root = candidates[0]

    return QualityModel(
        modules=tuple(mods),
        root_aspect=root,
        entities={e.id: e for m in mods for e in m.entities},
        factors=factors,
        measures={x.id: x for m in mods for x in m.measures},
        instruments={x.id: x for m in mods for x in m.instruments},
        impacts=tuple(sorted((i for m in mods for i in m.impacts), key=lambda i: (i.source, i.target))),
        evaluations={e.owner: e for m in mods for e in m.evaluations},
    )
