"""Bottom-up assessment of one system against a linked model."""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import TopologicalSorter
from typing import Mapping

from ..errors import ModelInvalid
from ..model.io import model_digest
from ..model.types import PRODUCT_FACTOR, MeasureBinding, QualityModel
from ..model.validate import aspect_children, errors, validate
from .grades import interpret
from .normalise import MeasurementDataset, normalise
from .result import AssessmentResult, ChildTrace, FactorResult
from .utility import UtilityInterval, utility, weighted_sum
from .weights import resolve_weights, weights_from_ranking

Interval = tuple[float, float]
_UNKNOWN: Interval = (0.0, 1.0)


@dataclass(frozen=True)
class _Edge:
    child: str  # factor id, or binding key for measures
    weight: float
    binding: MeasureBinding | None = None


class Assessor:
    """Evaluation plan for one model; reusable across many datasets.

    Construction validates the model and raises :class:`ModelInvalid` if it has
    errors.  The plan is read-only, so one assessor may serve several threads.
    """

    def __init__(self, model: QualityModel):
        problems = errors(validate(model))
        if problems:
            raise ModelInvalid(problems)
        self.model = model
        self.digest = model_digest(model)
        self.edges: dict[str, tuple[_Edge, ...]] = {}
        self.plan_notes: dict[str, str] = {}
        stack = [model.root_aspect]
        while stack:
            fid = stack.pop()
            if fid in self.edges:
                continue
            self.edges[fid] = self._edges_for(fid)
            stack.extend(e.child for e in self.edges[fid] if e.binding is None)
        graph = {fid: [e.child for e in es if e.binding is None] for fid, es in self.edges.items()}
        self.order: tuple[str, ...] = tuple(TopologicalSorter(graph).static_order())

    def _edges_for(self, fid: str) -> tuple[_Edge, ...]:
        model = self.model
        ev = model.evaluations.get(fid)
        if ev is not None:
            weights = resolve_weights(ev.weights, len(ev.child_ids))
            if ev.bindings:
                return tuple(_Edge(b.key, w, b) for b, w in zip(ev.bindings, weights))
            return tuple(_Edge(c, w) for c, w in zip(ev.children, weights))
        if model.factors[fid].kind == PRODUCT_FACTOR:
            self.plan_notes[fid] = f"product factor {fid} has no evaluation; utility interval [0, 1]"
            return ()
        kids = aspect_children(model, fid)
        if not kids:
            self.plan_notes[fid] = f"quality aspect {fid} has nothing to evaluate; utility interval [0, 1]"
            return ()
        self.plan_notes[fid] = f"quality aspect {fid} has no evaluation; children weighted equally"
        return tuple(_Edge(c, w) for c, w in zip(kids, weights_from_ranking([1] * len(kids))))

    # -- evaluation ------------------------------------------------------------------

    def evaluate(self, derived: Mapping[str, float | None]) -> tuple[dict[str, Interval], dict[str, Interval], list[str]]:
        """Utility intervals per factor and per binding key, plus missing keys."""
        leaves: dict[str, Interval] = {}
        missing: list[str] = []
        nodes: dict[str, Interval] = {}
        for fid in self.order:
            edges = self.edges[fid]
            if not edges:
                nodes[fid] = _UNKNOWN
                continue
            pairs = []
            for e in edges:
                if e.binding is None:
                    pairs.append((nodes[e.child], e.weight))
                    continue
                u = leaves.get(e.child)
                if u is None:
                    v = derived.get(e.child)
                    if v is None:
                        u = _UNKNOWN
                        missing.append(e.child)
                    else:
                        p = utility(e.binding.utility, v)
                        u = (p, p)
                    leaves[e.child] = u
                pairs.append((u, e.weight))
            nodes[fid] = weighted_sum(pairs)
        return nodes, leaves, missing

    def root_interval(self, derived: Mapping[str, float | None]) -> Interval:
        return self.evaluate(derived)[0][self.model.root_aspect]

    def assess(self, dataset: MeasurementDataset) -> AssessmentResult:
        if dataset.derived is None:
            dataset = normalise(dataset, self.model)
        derived = dataset.derived or {}
        nodes, leaves, missing = self.evaluate(derived)

        influence = {fid: 0.0 for fid in self.order}
        influence[self.model.root_aspect] = 1.0
        for fid in reversed(self.order):
            for e in self.edges[fid]:
                if e.binding is None:
                    influence[e.child] += influence[fid] * e.weight

        factors: dict[str, FactorResult] = {}
        for fid in sorted(self.order):
            f = self.model.factors[fid]
            u = UtilityInterval(*nodes[fid])
            children = tuple(
                ChildTrace(
                    id=e.child,
                    kind="factor" if e.binding is None else "measure",
                    weight=e.weight,
                    utility=UtilityInterval(*(nodes[e.child] if e.binding is None else leaves[e.child])),
                    value=None if e.binding is None else derived.get(e.child),
                    coverage=None if e.binding is None else e.binding.coverage,
                )
                for e in self.edges[fid]
            )
            factors[fid] = FactorResult(
                factor=fid,
                name=f.name,
                kind=f.kind,
                utility=u,
                weight_used=influence[fid],
                grade=interpret(u),
                children=children,
            )

        warnings = list(dataset.warnings)
        warnings += [self.plan_notes[fid] for fid in sorted(self.plan_notes)]
        warnings += [f"missing data for {key}; utility interval [0, 1]" for key in sorted(set(missing))]
        return AssessmentResult(
            system_id=dataset.system_id,
            model_digest=self.digest,
            root_aspect=self.model.root_aspect,
            factors=factors,
            warnings=tuple(warnings),
        )


def assess(model: QualityModel, dataset: MeasurementDataset) -> AssessmentResult:
    return Assessor(model).assess(dataset)
