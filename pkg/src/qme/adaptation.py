"""Goal-driven tailoring of a quality model.

Pre-tailoring removes every element whose context does not fit the goal and
then deletes whatever is left dangling (impacts of removed factors,
evaluations of removed owners, bindings of removed measures, ...).  Each
removal and each forced edit is logged in the adaptation history.  What
cannot be decided automatically becomes an adaptation task.

Context matching uses an element's *effective* tags: its own tags (plus the
``context_tag`` of instruments) or, if it has none, the tags of its module.
Elements without effective tags are context-neutral and survive context
filtering.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Literal

from .errors import GoalMatchesNothing, QmeError
from .model.link import link
from .model.types import (
    PRODUCT_FACTOR,
    QUALITY_ASPECT,
    EvaluationSpec,
    QualityModel,
    WeightSpec,
)
from .model.validate import aspect_children, errors, validate


@dataclass(frozen=True)
class AdaptationGoal:
    artefact_types: tuple[str, ...] = ()
    perspective: str = ""
    quality_focus: tuple[str, ...] = ()
    context_tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.quality_focus and not self.context_tags:
            raise ValueError("an adaptation goal needs quality_focus or context_tags")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AdaptationGoal:
        unknown = set(d) - {"artefact_types", "perspective", "quality_focus", "context_tags"}
        if unknown:
            raise ValueError(f"unknown goal keys: {sorted(unknown)}")
        return cls(
            artefact_types=tuple(d.get("artefact_types", ())),
            perspective=d.get("perspective", ""),
            quality_focus=tuple(d.get("quality_focus", ())),
            context_tags=tuple(d.get("context_tags", ())),
        )

    @classmethod
    def load(cls, path: str | Path) -> AdaptationGoal:
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))


@dataclass(frozen=True)
class AdaptationTask:
    kind: Literal["review", "add", "modify"]
    target: str
    reason: str
    done: bool = False


@dataclass(frozen=True)
class HistoryEntry:
    timestamp: str
    action: Literal["remove", "modify"]
    element: str
    justification: str
    origin: Literal["automatic", "manual"] = "automatic"
    conflict: bool = False


@dataclass
class AdaptationPlan:
    model: QualityModel
    history: list[HistoryEntry] = field(default_factory=list)
    tasks: list[AdaptationTask] = field(default_factory=list)

    def tasks_json(self) -> str:
        return json.dumps([asdict(t) for t in self.tasks], indent=2) + "\n"

    def history_json(self) -> str:
        return json.dumps([asdict(h) for h in self.history], indent=2) + "\n"

    def tasks_text(self) -> str:
        lines = [f"[{'x' if t.done else ' '}] {t.kind:<6} {t.target}: {t.reason}" for t in self.tasks]
        return "\n".join(lines) + ("\n" if lines else "")

    def history_text(self) -> str:
        lines = [
            f"{h.timestamp} {h.action:<6} {h.element} ({h.origin}{', conflict' if h.conflict else ''}): {h.justification}"
            for h in self.history
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def default_clock() -> datetime:
    # SOURCE_DATE_EPOCH pins timestamps for reproducible output
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    return datetime.now(timezone.utc)


def _eval_id(owner: str) -> str:
    return f"evaluation:{owner}"


def _reweight(spec: WeightSpec, keep: list[int]) -> WeightSpec:
    if spec.mode == "ranked":
        ranks = spec.ranks or ()
        return WeightSpec(mode="ranked", ranks=tuple(ranks[i] for i in keep))
    ws = [(spec.explicit_weights or ())[i] for i in keep]
    total = sum(ws)
    if total > 0:
        ws = [w / total for w in ws]
    else:
        ws = [1.0 / len(ws)] * len(ws) if ws else []
    return WeightSpec(mode="explicit", explicit_weights=tuple(ws))


class _Tailor:
    def __init__(self, model: QualityModel, goal: AdaptationGoal, stamp: str):
        self.model = model
        self.goal = goal
        self.stamp = stamp
        self.history: list[HistoryEntry] = []
        self.removed: set[str] = set()
        self.factors = dict(model.factors)
        self.entities = dict(model.entities)
        self.measures = dict(model.measures)
        self.instruments = dict(model.instruments)
        self.impacts = {i.id: i for i in model.impacts}
        self.evaluations = dict(model.evaluations)
        self.module_tags = {m.id: set(m.tags) for m in model.modules}
        self.used_before = self._used_measures()
        self.entities_used_before = self._used_entities()

    def log(self, action: str, element: str, why: str, conflict: bool = False) -> None:
        self.history.append(HistoryEntry(self.stamp, action, element, why, "automatic", conflict))  # type: ignore[arg-type]

    def effective_tags(self, own: Iterable[str], module: str) -> set[str]:
        return set(own) or self.module_tags.get(module, set())

    # -- filtering -----------------------------------------------------------

    def focus_relevant(self) -> tuple[set[str], set[str]]:
        """Quality aspects kept by the focus, and product factors impacting them.

        A focused aspect keeps its ancestors (the path to the root) and its
        descendants (everything that refines it).
        """
        focus = set(self.goal.quality_focus)
        aspects = {f.id: f for f in self.factors.values() if f.kind == QUALITY_ASPECT}
        if not focus:
            keep = set(aspects)
        else:
            hits = {a.id for a in aspects.values() if a.id in focus or focus & set(a.tags)}
            if not hits:
                raise GoalMatchesNothing(f"quality focus {sorted(focus)} matches no quality aspect")
            up = set(hits)
            frontier = list(hits)
            while frontier:
                for p in aspects[frontier.pop()].refines:
                    if p in aspects and p not in up:
                        up.add(p)
                        frontier.append(p)
            down = set(hits)
            changed = True
            while changed:
                changed = False
                for a in aspects.values():
                    if a.id not in down and set(a.refines) & down:
                        down.add(a.id)
                        changed = True
            keep = up | down | {self.model.root_aspect}
        pfs = {i.source for i in self.impacts.values() if i.target in keep}
        return keep, pfs

    def apply_goal(self) -> None:
        ctx = set(self.goal.context_tags)
        focus_aspects, focus_pfs = self.focus_relevant()

        matched = False
        pools: list[tuple[dict, Callable[[Any], set[str]]]] = [
            (self.entities, lambda e: self.effective_tags(e.tags, e.module)),
            (self.factors, lambda f: self.effective_tags(f.tags, f.module)),
            (self.measures, lambda m: self.effective_tags(m.tags, m.module)),
            (self.instruments, lambda i: self.effective_tags(i.all_tags, i.module)),
            (self.impacts, lambda i: self.effective_tags(i.tags, i.module)),
            (self.evaluations, lambda e: self.effective_tags((), e.module)),
        ]
        doomed: list[tuple[str, str, bool]] = []
        for pool, tags_of in pools:
            for key in sorted(pool):
                tags = tags_of(pool[key])
                if not ctx or not tags:
                    continue
                if tags & ctx:
                    matched = True
                    continue
                elem_id = _eval_id(key) if pool is self.evaluations else key
                conflict = key in focus_aspects or key in focus_pfs if self.goal.quality_focus else False
                why = f"context tags {sorted(tags)} do not match goal context {sorted(ctx)}"
                if conflict:
                    why = "conflict: relevant to the quality focus but " + why
                doomed.append((elem_id, why, conflict))
        if ctx and not matched:
            raise GoalMatchesNothing(f"no element carries any of the context tags {sorted(ctx)}")

        for elem_id, why, conflict in doomed:
            self.remove(elem_id, why, conflict)
        if self.goal.quality_focus:
            for a in sorted(self.factors):
                f = self.factors.get(a)
                if f and f.kind == QUALITY_ASPECT and a not in focus_aspects:
                    self.remove(a, "quality aspect outside the goal's quality focus")

    # -- removal and cascade -----------------------------------------------------

    def remove(self, elem_id: str, why: str, conflict: bool = False) -> None:
        if elem_id in self.removed:
            return
        for pool in (self.entities, self.factors, self.measures, self.instruments, self.impacts):
            if elem_id in pool:
                del pool[elem_id]
                break
        else:
            if elem_id.startswith("evaluation:") and elem_id[len("evaluation:"):] in self.evaluations:
                del self.evaluations[elem_id[len("evaluation:"):]]
            else:
                return
        self.removed.add(elem_id)
        self.log("remove", elem_id, why, conflict)

    def cascade(self) -> None:
        had_impacts = {i.source for i in self.model.impacts}
        changed = True
        while changed:
            n_before = len(self.history)
            for f in sorted(self.factors.values(), key=lambda f: f.id):
                if f.entity not in self.entities:
                    self.remove(f.id, f"its entity {f.entity} was removed")
            for f in sorted(self.factors.values(), key=lambda f: f.id):
                gone = [p for p in f.refines if p not in self.factors]
                if gone and len(gone) == len(f.refines):
                    self.remove(f.id, f"every factor it refines was removed ({', '.join(gone)})")
                elif gone:
                    self.factors[f.id] = replace(f, refines=tuple(p for p in f.refines if p in self.factors))
                    self.log("modify", f.id, f"dropped refinement of removed {', '.join(gone)}")
            for e in sorted(self.entities.values(), key=lambda e: e.id):
                gone = [p for p in (*e.is_a, *e.part_of) if p not in self.entities]
                if gone:
                    self.entities[e.id] = replace(
                        e,
                        is_a=tuple(p for p in e.is_a if p in self.entities),
                        part_of=tuple(p for p in e.part_of if p in self.entities),
                    )
                    self.log("modify", e.id, f"dropped hierarchy links to removed {', '.join(gone)}")
            for key, imp in sorted(self.impacts.items()):
                if imp.source not in self.factors or imp.target not in self.factors:
                    self.remove(key, "dangling impact: an endpoint factor was removed")
            for i in sorted(self.instruments.values(), key=lambda i: i.id):
                if i.measure not in self.measures:
                    self.remove(i.id, f"its measure {i.measure} was removed")
            sources = {i.source for i in self.impacts.values()}
            for f in sorted(self.factors.values(), key=lambda f: f.id):
                if f.kind == PRODUCT_FACTOR and f.id in had_impacts and f.id not in sources:
                    if not any(f.id in s.refines for s in self.factors.values()):
                        self.remove(f.id, "product factor no longer impacts any quality aspect")
            used = self._used_measures()
            for m in sorted(self.measures):
                if m in self.used_before and m not in used:
                    self.remove(m, "measure no longer bound to any factor or used as normaliser")
            used = self._used_entities()
            for e in sorted(self.entities):
                if e in self.entities_used_before and e not in used:
                    self.remove(e, "entity no longer referenced by any factor or entity")
            for owner in sorted(self.evaluations):
                if owner not in self.factors:
                    self.remove(_eval_id(owner), f"its owner {owner} was removed")
                    continue
                self._prune_evaluation(self.evaluations[owner])
            changed = len(self.history) != n_before

    def _used_measures(self) -> set[str]:
        used: set[str] = set()
        for ev in self.evaluations.values():
            for b in ev.bindings:
                used.add(b.measure)
                if b.normaliser:
                    used.add(b.normaliser)
        return used

    def _used_entities(self) -> set[str]:
        used = {f.entity for f in self.factors.values()}
        for e in self.entities.values():
            used.update(e.is_a)
            used.update(e.part_of)
        return used

    def _prune_evaluation(self, ev: EvaluationSpec) -> None:
        if ev.bindings:
            keep = [
                i for i, b in enumerate(ev.bindings)
                if b.measure in self.measures and (b.normaliser is None or b.normaliser in self.measures)
            ]
            if len(keep) == len(ev.bindings):
                return
            dropped = [ev.bindings[i].key for i in range(len(ev.bindings)) if i not in keep]
            new = replace(ev, bindings=tuple(ev.bindings[i] for i in keep), weights=_reweight(ev.weights, keep))
        else:
            allowed = {f.id for f in self.factors.values() if ev.owner in f.refines and f.kind == QUALITY_ASPECT}
            allowed |= {i.source for i in self.impacts.values() if i.target == ev.owner}
            keep = [i for i, c in enumerate(ev.children) if c in allowed]
            if len(keep) == len(ev.children):
                return
            dropped = [ev.children[i] for i in range(len(ev.children)) if i not in keep]
            new = replace(ev, children=tuple(ev.children[i] for i in keep), weights=_reweight(ev.weights, keep))
        if not new.child_ids:
            self.remove(_eval_id(ev.owner), f"nothing left to evaluate after removing {', '.join(dropped)}")
            return
        self.evaluations[ev.owner] = new
        self.log("modify", _eval_id(ev.owner), f"dropped {', '.join(dropped)}; weights re-derived")

    def build(self) -> QualityModel:
        if self.model.root_aspect not in self.factors:
            raise GoalMatchesNothing("the goal removes the root quality aspect")
        if not any(f.kind == PRODUCT_FACTOR for f in self.factors.values()):
            raise GoalMatchesNothing("no product factor survives the goal")
        modules = []
        for m in self.model.modules:
            modules.append(
                replace(
                    m,
                    entities=tuple(self.entities[e.id] for e in m.entities if e.id in self.entities),
                    factors=tuple(self.factors[f.id] for f in m.factors if f.id in self.factors),
                    measures=tuple(x for x in m.measures if x.id in self.measures),
                    instruments=tuple(x for x in m.instruments if x.id in self.instruments),
                    impacts=tuple(x for x in m.impacts if x.id in self.impacts),
                    evaluations=tuple(self.evaluations[e.owner] for e in m.evaluations if e.owner in self.evaluations),
                )
            )
        return link(modules)


def pretailor(
    model: QualityModel, goal: AdaptationGoal, clock: Callable[[], datetime] = default_clock
) -> tuple[QualityModel, list[HistoryEntry]]:
    """Remove the elements that do not satisfy ``goal``, plus what they leave dangling.

    Raises :class:`GoalMatchesNothing` rather than returning an empty model.
    """
    stamp = clock().isoformat(timespec="seconds")
    t = _Tailor(model, goal, stamp)
    t.apply_goal()
    t.cascade()
    tailored = t.build()
    problems = errors(validate(tailored))
    if problems:
        raise QmeError(f"tailoring produced an invalid model: {problems}")
    return tailored, t.history


def generate_tasks(model: QualityModel) -> list[AdaptationTask]:
    tasks: list[AdaptationTask] = []
    for f in sorted(model.factors.values(), key=lambda f: f.id):
        ev = model.evaluations.get(f.id)
        if f.kind == PRODUCT_FACTOR and model.impacts_from(f.id) and not (ev and ev.bindings):
            tasks.append(AdaptationTask("add", f.id, "product factor has impacts but no measures; add a measure"))
        if f.kind == QUALITY_ASPECT and not aspect_children(model, f.id):
            tasks.append(AdaptationTask("review", f.id, "no product factor impacts this quality aspect"))
    normalised = {b.measure for _, b in model.bindings() if b.normaliser}
    instrumented = {i.measure for i in model.instruments.values()}
    for m in sorted(model.measures.values(), key=lambda m: m.id):
        if m.value_kind == "findings_count" and not m.is_normalisation_measure and m.id not in normalised:
            tasks.append(
                AdaptationTask(
                    "modify", m.id,
                    "findings-count measure has no normaliser; associate a normalisation measure",
                )
            )
        if m.id not in instrumented:
            tasks.append(AdaptationTask("add", m.id, "measure has no instrument; add a tool rule or manual instrument"))
    return tasks


def adapt(model: QualityModel, goal: AdaptationGoal, clock: Callable[[], datetime] = default_clock) -> AdaptationPlan:
    """Pre-tailor ``model`` and list the manual follow-up tasks."""
    tailored, history = pretailor(model, goal, clock)
    tasks = [
        AdaptationTask("review", h.element, "dropped although relevant to the quality focus; " + h.justification)
        for h in history
        if h.conflict
    ]
    tasks += generate_tasks(tailored)
    return AdaptationPlan(tailored, history, tasks)
