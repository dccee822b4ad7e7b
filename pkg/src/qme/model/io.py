"""Reading and writing module files (one JSON document per module)."""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable

import jsonschema

from ..errors import ModelFormatError
from .types import (
    Entity,
    EvaluationSpec,
    Factor,
    Impact,
    Instrument,
    Measure,
    MeasureBinding,
    QmModule,
    UtilityFunction,
    WeightSpec,
)


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict[str, Any]:
    text = resources.files("qme.schemas").joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _check_schema(data: Any, source: str, strict: bool) -> list[str]:
    validator = jsonschema.Draft202012Validator(load_schema("module"))
    warnings: list[str] = []
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    for err in errors:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        if err.validator == "additionalProperties" and not strict:
            warnings.append(f"{source}: {where}: {err.message} (ignored)")
            continue
        raise ModelFormatError(f"{source}: {where}: {err.message}")
    return warnings


def _global(module_id: str, ref: str) -> str:
    return ref if "/" in ref else f"{module_id}/{ref}"


def _define(module_id: str, local: str, source: str) -> str:
    if "/" not in local:
        return f"{module_id}/{local}"
    if not local.startswith(module_id + "/"):
        raise ModelFormatError(
            f"{source}: id {local!r} is namespaced outside module {module_id!r}"
        )
    return local


def module_from_dict(data: Any, *, strict: bool = True, source: str = "<module>") -> tuple[QmModule, list[str]]:
    """Build a module from its decoded JSON form.

    Returns the module and a list of warnings (unknown keys in lenient mode).
    """
    warnings = _check_schema(data, source, strict)
    mid: str = data["id"]
    g = lambda ref: _global(mid, ref)  # noqa: E731
    gs = lambda refs: tuple(g(r) for r in refs)  # noqa: E731

    entities = tuple(
        Entity(
            id=_define(mid, e["id"], source),
            name=e["name"],
            module=mid,
            description=e.get("description", ""),
            is_a=gs(e.get("is_a", ())),
            part_of=gs(e.get("part_of", ())),
            tags=tuple(e.get("tags", ())),
            annotations=dict(e.get("annotations", {})),
        )
        for e in data.get("entities", ())
    )
    factors = tuple(
        Factor(
            id=_define(mid, f["id"], source),
            name=f["name"],
            kind=f["kind"],
            entity=g(f["entity"]),
            module=mid,
            description=f.get("description", ""),
            refines=gs(f.get("refines", ())),
            tags=tuple(f.get("tags", ())),
            annotations=dict(f.get("annotations", {})),
        )
        for f in data.get("factors", ())
    )
    measures = tuple(
        Measure(
            id=_define(mid, m["id"], source),
            name=m["name"],
            value_kind=m["value_kind"],
            module=mid,
            is_normalisation_measure=bool(m.get("is_normalisation_measure", False)),
            description=m.get("description", ""),
            tags=tuple(m.get("tags", ())),
            annotations=dict(m.get("annotations", {})),
        )
        for m in data.get("measures", ())
    )
    instruments = tuple(
        Instrument(
            id=_define(mid, i["id"], source),
            measure=g(i["measure"]),
            source=i["source"],
            module=mid,
            tool_name=i.get("tool_name"),
            rule_id=i.get("rule_id"),
            context_tag=i.get("context_tag"),
            tags=tuple(i.get("tags", ())),
        )
        for i in data.get("instruments", ())
    )
    impacts = tuple(
        Impact(
            source=g(i["source"]),
            target=g(i["target"]),
            polarity=i["polarity"],
            module=mid,
            justification=i.get("justification", ""),
            tags=tuple(i.get("tags", ())),
        )
        for i in data.get("impacts", ())
    )
    evaluations = tuple(_evaluation(mid, e, g) for e in data.get("evaluations", ()))
    root = data.get("root_aspect")
    module = QmModule(
        id=mid,
        requires=tuple(data.get("requires", ())),
        entities=entities,
        factors=factors,
        measures=measures,
        instruments=instruments,
        impacts=impacts,
        evaluations=evaluations,
        root_aspect=g(root) if root else None,
        description=data.get("description", ""),
        tags=tuple(data.get("tags", ())),
    )
    return module, warnings


def _evaluation(mid: str, e: dict[str, Any], g) -> EvaluationSpec:
    bindings = tuple(
        MeasureBinding(
            measure=g(b["measure"]),
            normaliser=g(b["normaliser"]) if b.get("normaliser") else None,
            utility=UtilityFunction(
                shape=b["utility"]["shape"],
                min=float(b["utility"]["min"]),
                max=float(b["utility"]["max"]),
            ),
            coverage=float(b.get("coverage", 1.0)),
        )
        for b in e.get("measures", ())
    )
    children = tuple(g(c) for c in e.get("children", ()))
    w = e.get("weights")
    if w is None:
        weights = WeightSpec.equal(len(bindings) + len(children))
    elif w["mode"] == "explicit":
        weights = WeightSpec(mode="explicit", explicit_weights=tuple(float(x) for x in w.get("weights", ())))
    else:
        weights = WeightSpec(mode="ranked", ranks=tuple(w.get("ranks", ())))
    return EvaluationSpec(
        owner=g(e["owner"]), weights=weights, module=mid, bindings=bindings, children=children
    )


def load_module(path: str | Path, *, strict: bool = True) -> tuple[QmModule, list[str]]:
    path = Path(path)
    try:
        data = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON: {exc}") from exc
    return module_from_dict(data, strict=strict, source=str(path))


def model_files(paths: Iterable[str | Path]) -> list[Path]:
    """Expand directories into the sorted ``*.json`` files they contain."""
    out: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(p.glob("*.json")))
        else:
            out.append(p)
    return out


def load_modules(paths: Iterable[str | Path], *, strict: bool = True) -> tuple[list[QmModule], list[str]]:
    modules, warnings = [], []
    for f in model_files(paths):
        m, w = load_module(f, strict=strict)
        modules.append(m)
        warnings.extend(w)
    return modules, warnings


# -- serialisation ---------------------------------------------------------------


def _local(mid: str, ref: str) -> str:
    prefix = mid + "/"
    return ref[len(prefix):] if ref.startswith(prefix) else ref


def module_to_dict(module: QmModule) -> dict[str, Any]:
    mid = module.id
    lo = lambda ref: _local(mid, ref)  # noqa: E731
    los = lambda refs: [lo(r) for r in refs]  # noqa: E731

    def opt(d: dict[str, Any], **kw: Any) -> dict[str, Any]:
        d.update({k: v for k, v in kw.items() if v not in (None, "", [], {})})
        return d

    out: dict[str, Any] = {"id": mid}
    opt(out, description=module.description, tags=list(module.tags), root_aspect=lo(module.root_aspect) if module.root_aspect else None)
    out["requires"] = list(module.requires)
    out["entities"] = [
        opt({"id": lo(e.id), "name": e.name}, description=e.description, is_a=los(e.is_a),
            part_of=los(e.part_of), tags=list(e.tags), annotations=e.annotations)
        for e in module.entities
    ]
    out["factors"] = [
        opt({"id": lo(f.id), "name": f.name, "kind": f.kind, "entity": lo(f.entity)},
            description=f.description, refines=los(f.refines), tags=list(f.tags), annotations=f.annotations)
        for f in module.factors
    ]
    out["measures"] = [
        opt({"id": lo(m.id), "name": m.name, "value_kind": m.value_kind,
             "is_normalisation_measure": m.is_normalisation_measure},
            description=m.description, tags=list(m.tags), annotations=m.annotations)
        for m in module.measures
    ]
    out["instruments"] = [
        opt({"id": lo(i.id), "measure": lo(i.measure), "source": i.source},
            tool_name=i.tool_name, rule_id=i.rule_id, context_tag=i.context_tag, tags=list(i.tags))
        for i in module.instruments
    ]
    out["impacts"] = [
        opt({"source": lo(i.source), "target": lo(i.target), "polarity": i.polarity},
            justification=i.justification, tags=list(i.tags))
        for i in module.impacts
    ]
    out["evaluations"] = [_evaluation_to_dict(e, lo) for e in module.evaluations]
    return out


def _evaluation_to_dict(e: EvaluationSpec, lo) -> dict[str, Any]:
    d: dict[str, Any] = {"owner": lo(e.owner)}
    if e.weights.mode == "explicit":
        d["weights"] = {"mode": "explicit", "weights": list(e.weights.explicit_weights or ())}
    else:
        d["weights"] = {"mode": "ranked", "ranks": list(e.weights.ranks or ())}
    if e.bindings:
        d["measures"] = []
        for b in e.bindings:
            bd: dict[str, Any] = {"measure": lo(b.measure)}
            if b.normaliser:
                bd["normaliser"] = lo(b.normaliser)
            bd["utility"] = {"shape": b.utility.shape, "min": b.utility.min, "max": b.utility.max}
            bd["coverage"] = b.coverage
            d["measures"].append(bd)
    if e.children:
        d["children"] = [lo(c) for c in e.children]
    return d


def dumps_module(module: QmModule) -> str:
    return json.dumps(module_to_dict(module), indent=2, ensure_ascii=False) + "\n"


def model_digest(model) -> str:
    """Content hash of a linked model, used to tell results of different models apart."""
    payload = json.dumps(
        {"root": model.root_aspect, "modules": [module_to_dict(m) for m in model.modules]},
        sort_keys=True,
    )
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()
