"""Meta-model element types.

All element types are frozen dataclasses.  Element ids are global strings of
the form ``"<module>/<local-name>"``; every reference field holds such a
global id once the owning module has been loaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

FactorKind = Literal["quality_aspect", "product_factor"]
Polarity = Literal["positive", "negative"]
ValueKind = Literal["findings_count", "numeric"]
InstrumentSource = Literal["tool", "manual"]
Shape = Literal["linear_increasing", "linear_decreasing"]
WeightMode = Literal["explicit", "ranked"]

QUALITY_ASPECT: FactorKind = "quality_aspect"
PRODUCT_FACTOR: FactorKind = "product_factor"


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    module: str
    description: str = ""
    is_a: tuple[str, ...] = ()
    part_of: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    annotations: dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Factor:
    id: str
    name: str
    kind: FactorKind
    entity: str
    module: str
    description: str = ""
    refines: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    annotations: dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Impact:
    source: str
    target: str
    polarity: Polarity
    module: str
    justification: str = ""
    tags: tuple[str, ...] = ()

    @property
    def id(self) -> str:
        return f"{self.source}->{self.target}"


@dataclass(frozen=True)
class Measure:
    id: str
    name: str
    value_kind: ValueKind
    module: str
    is_normalisation_measure: bool = False
    description: str = ""
    tags: tuple[str, ...] = ()
    annotations: dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Instrument:
    id: str
    measure: str
    source: InstrumentSource
    module: str
    tool_name: str | None = None
    rule_id: str | None = None
    context_tag: str | None = None
    tags: tuple[str, ...] = ()

    @property
    def all_tags(self) -> tuple[str, ...]:
        if self.context_tag and self.context_tag not in self.tags:
            return (*self.tags, self.context_tag)
        return self.tags


@dataclass(frozen=True)
class UtilityFunction:
    """Clamped linear map from a measure value to a utility in [0, 1]."""

    shape: Shape
    min: float
    max: float

    @property
    def increasing(self) -> bool:
        return self.shape == "linear_increasing"


@dataclass(frozen=True)
class WeightSpec:
    mode: WeightMode
    explicit_weights: tuple[float, ...] | None = None
    ranks: tuple[int, ...] | None = None

    @classmethod
    def equal(cls, n: int) -> WeightSpec:
        return cls(mode="ranked", ranks=(1,) * n)

    def __len__(self) -> int:
        if self.mode == "explicit":
            return len(self.explicit_weights or ())
        return len(self.ranks or ())


@dataclass(frozen=True)
class MeasureBinding:
    measure: str
    utility: UtilityFunction
    normaliser: str | None = None
    coverage: float = 1.0

    @property
    def key(self) -> str:
        """Key of the (possibly normalised) value this binding evaluates."""
        return derived_key(self.measure, self.normaliser)


def derived_key(measure: str, normaliser: str | None) -> str:
    return measure if normaliser is None else f"{measure}@{normaliser}"


@dataclass(frozen=True)
class EvaluationSpec:
    """Evaluation of one factor.

    Product factors aggregate ``bindings``; quality aspects aggregate
    ``children`` (impacting product factors and refining sub-aspects).  The
    weight spec is positional over whichever list is populated.
    """

    owner: str
    weights: WeightSpec
    module: str
    bindings: tuple[MeasureBinding, ...] = ()
    children: tuple[str, ...] = ()

    @property
    def child_ids(self) -> tuple[str, ...]:
        if self.bindings:
            return tuple(b.key for b in self.bindings)
        return self.children


@dataclass(frozen=True)
class QmModule:
    id: str
    requires: tuple[str, ...] = ()
    entities: tuple[Entity, ...] = ()
    factors: tuple[Factor, ...] = ()
    measures: tuple[Measure, ...] = ()
    instruments: tuple[Instrument, ...] = ()
    impacts: tuple[Impact, ...] = ()
    evaluations: tuple[EvaluationSpec, ...] = ()
    root_aspect: str | None = None
    description: str = ""
    tags: tuple[str, ...] = ()

    def element_count(self) -> int:
        return (
            len(self.entities)
            + len(self.factors)
            + len(self.measures)
            + len(self.instruments)
            + len(self.impacts)
            + len(self.evaluations)
        )


@dataclass(frozen=True, eq=False)
class QualityModel:
    """A linked model.  Treat every container as read-only."""

    modules: tuple[QmModule, ...]
    root_aspect: str
    entities: dict[str, Entity]
    factors: dict[str, Factor]
    measures: dict[str, Measure]
    instruments: dict[str, Instrument]
    impacts: tuple[Impact, ...]
    evaluations: dict[str, EvaluationSpec]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QualityModel):
            return NotImplemented
        return self.modules == other.modules and self.root_aspect == other.root_aspect

    __hash__ = None  # type: ignore[assignment]

    @property
    def module_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.modules)

    def module(self, module_id: str) -> QmModule:
        for m in self.modules:
            if m.id == module_id:
                return m
        raise KeyError(module_id)

    def impacts_on(self, aspect: str) -> list[Impact]:
        return [i for i in self.impacts if i.target == aspect]

    def impacts_from(self, factor: str) -> list[Impact]:
        return [i for i in self.impacts if i.source == factor]

    def sub_factors(self, factor: str) -> list[Factor]:
        return [f for f in self.factors.values() if factor in f.refines]

    def bindings(self) -> list[tuple[str, MeasureBinding]]:
        return [(e.owner, b) for e in self.evaluations.values() for b in e.bindings]

    def element_count(self) -> int:
        return sum(m.element_count() for m in self.modules)
