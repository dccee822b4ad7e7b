"""Assessment result tree and its JSON result-file form."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Literal

from .grades import GradeResult
from .utility import UtilityInterval

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class ChildTrace:
    id: str
    kind: Literal["factor", "measure"]
    weight: float
    utility: UtilityInterval
    value: float | None = None  # measure children only
    coverage: float | None = None  # measure children only, reported verbatim

    @property
    def contribution(self) -> UtilityInterval:
        return UtilityInterval(self.weight * self.utility.lo, self.weight * self.utility.hi)


@dataclass(frozen=True)
class FactorResult:
    factor: str
    name: str
    kind: str
    utility: UtilityInterval
    weight_used: float
    grade: tuple[GradeResult, GradeResult]  # for utility.lo, utility.hi
    children: tuple[ChildTrace, ...] = ()


@dataclass(frozen=True)
class AssessmentResult:
    system_id: str
    model_digest: str
    root_aspect: str
    factors: dict[str, FactorResult]
    warnings: tuple[str, ...] = ()

    @property
    def root(self) -> FactorResult:
        return self.factors[self.root_aspect]

    @property
    def root_grade(self) -> tuple[GradeResult, GradeResult]:
        return self.root.grade

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "system_id": self.system_id,
            "model_digest": self.model_digest,
            "root_aspect": self.root_aspect,
            "root_grade": _grade_pair(self.root_grade),
            "factors": {fid: _factor_to_dict(fr) for fid, fr in self.factors.items()},
            "warnings": list(self.warnings),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AssessmentResult:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported result schema version {d.get('schema_version')!r}")
        factors = {fid: _factor_from_dict(fid, fd) for fid, fd in d["factors"].items()}
        return cls(
            system_id=d["system_id"],
            model_digest=d["model_digest"],
            root_aspect=d["root_aspect"],
            factors=factors,
            warnings=tuple(d.get("warnings", ())),
        )

    @classmethod
    def loads(cls, text: str) -> AssessmentResult:
        return cls.from_dict(json.loads(text))


def _interval(u: UtilityInterval) -> dict[str, float]:
    return {"lo": u.lo, "hi": u.hi}


def _grade_pair(g: tuple[GradeResult, GradeResult]) -> dict[str, Any]:
    return {"lo": g[0].to_dict(), "hi": g[1].to_dict()}


def _factor_to_dict(fr: FactorResult) -> dict[str, Any]:
    children = []
    for c in fr.children:
        cd: dict[str, Any] = {
            "id": c.id,
            "kind": c.kind,
            "weight": c.weight,
            "utility": _interval(c.utility),
            "contribution": _interval(c.contribution),
        }
        if c.kind == "measure":
            cd["value"] = c.value
            cd["coverage"] = c.coverage
        children.append(cd)
    return {
        "name": fr.name,
        "kind": fr.kind,
        "utility": _interval(fr.utility),
        "weight_used": fr.weight_used,
        "grade": _grade_pair(fr.grade),
        "children": children,
    }


def _factor_from_dict(fid: str, fd: dict[str, Any]) -> FactorResult:
    g = fd["grade"]
    return FactorResult(
        factor=fid,
        name=fd["name"],
        kind=fd["kind"],
        utility=UtilityInterval(**fd["utility"]),
        weight_used=fd["weight_used"],
        grade=(GradeResult(**g["lo"]), GradeResult(**g["hi"])),
        children=tuple(
            ChildTrace(
                id=c["id"],
                kind=c["kind"],
                weight=c["weight"],
                utility=UtilityInterval(**c["utility"]),
                value=c.get("value"),
                coverage=c.get("coverage"),
            )
            for c in fd["children"]
        ),
    )
