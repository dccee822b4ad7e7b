"""Independent reference implementation used to cross-check the engine.

The generator emits plain module dicts (the on-disk JSON form).  The evaluator
works on those dicts directly: it re-derives weights, utilities and
normalisation from their textbook definitions and recurses from the root
without any caching or topological ordering.  Nothing here imports the
engine.
"""

from __future__ import annotations

import random
from typing import Any

MID = "m"


def roc(ranks: list[int]) -> list[float]:
    """Rank-order centroid weights; tied ranks share the mean of their slots."""
    n = len(ranks)
    slot = [sum(1.0 / k for k in range(i, n + 1)) / n for i in range(1, n + 1)]
    order = sorted(range(n), key=lambda i: ranks[i])
    out = [0.0] * n
    pos = 0
    while pos < n:
        end = pos
        while end + 1 < n and ranks[order[end + 1]] == ranks[order[pos]]:
            end += 1
        share = sum(slot[pos : end + 1]) / (end - pos + 1)
        for j in range(pos, end + 1):
            out[order[j]] = share
        pos = end + 1
    return out


def clamp_lerp(shape: str, lo: float, hi: float, v: float) -> float:
    if shape == "linear_increasing":
        if v >= hi:
            return 1.0
        if v <= lo:
            return 0.0
        return (v - lo) / (hi - lo)
    if v >= hi:
        return 0.0
    if v <= lo:
        return 1.0
    return 1.0 - (v - lo) / (hi - lo)


def random_model(rng: random.Random, max_factors: int = 10) -> dict[str, Any]:
    """One module: root -> 0..3 sub-aspects -> product factors -> measures."""
    n_sub = rng.randint(0, 3)
    n_pf = rng.randint(1, max_factors - 1 - n_sub)
    aspects = ["root"] + [f"qa{i}" for i in range(n_sub)]
    leaves = aspects[1:] or ["root"]
    factors = [{"id": "root", "name": "Root", "kind": "quality_aspect", "entity": "product"}]
    factors += [
        {"id": a, "name": a, "kind": "quality_aspect", "entity": "product", "refines": ["root"]}
        for a in aspects[1:]
    ]
    measures = [{"id": "size", "name": "size", "value_kind": "numeric", "is_normalisation_measure": True}]
    impacts, evaluations = [], []
    targets: dict[str, list[str]] = {a: [] for a in aspects}
    for a in aspects[1:]:
        targets["root"].append(a)
    for p in range(n_pf):
        pf = f"pf{p}"
        factors.append({"id": pf, "name": pf, "kind": "product_factor", "entity": "part"})
        hit = rng.sample(leaves, rng.randint(1, len(leaves)))
        for t in hit:
            impacts.append({"source": pf, "target": t, "polarity": rng.choice(["positive", "negative"])})
            targets[t].append(pf)
        bindings = []
        for k in range(rng.randint(1, 3)):
            mid = f"{pf}m{k}"
            kind = rng.choice(["findings_count", "numeric"])
            measures.append({"id": mid, "name": mid, "value_kind": kind})
            lo = rng.uniform(0, 5)
            hi = lo if rng.random() < 0.1 else lo + rng.uniform(0.01, 10)
            b = {"measure": mid, "utility": {"shape": rng.choice(["linear_increasing", "linear_decreasing"]),
                                             "min": lo, "max": hi}}
            if kind == "findings_count" and rng.random() < 0.7:
                b["normaliser"] = "size"
                b["utility"]["min"] /= 100
                b["utility"]["max"] /= 100
            bindings.append(b)
        evaluations.append({"owner": pf, "weights": _random_weights(rng, len(bindings)), "measures": bindings})
    for a in aspects:
        kids = targets[a]
        if not kids:  # sub-aspect nobody impacts: give it the first product factor
            impacts.append({"source": "pf0", "target": a, "polarity": "negative"})
            kids.append("pf0")
        evaluations.append({"owner": a, "weights": _random_weights(rng, len(kids)), "children": list(kids)})
    return {
        "id": MID,
        "root_aspect": "root",
        "entities": [{"id": "product", "name": "product"}, {"id": "part", "name": "part", "part_of": ["product"]}],
        "factors": factors,
        "measures": measures,
        "impacts": impacts,
        "evaluations": evaluations,
    }


def _random_weights(rng: random.Random, n: int) -> dict[str, Any]:
    if rng.random() < 0.5:
        return {"mode": "ranked", "ranks": [rng.randint(1, n) for _ in range(n)]}
    raw = [rng.uniform(0.05, 1) for _ in range(n)]
    s = sum(raw)
    return {"mode": "explicit", "weights": [x / s for x in raw]}


def random_raw(rng: random.Random, module: dict[str, Any]) -> dict[str, float]:
    raw = {}
    for m in module["measures"]:
        key = f"{MID}/{m['id']}"
        if m["id"] == "size":
            raw[key] = float(rng.randint(1_000, 200_000))
        elif m["value_kind"] == "findings_count":
            raw[key] = float(rng.randint(0, 400))
        else:
            raw[key] = rng.uniform(-1, 16)
    return raw


def binding_keys(module: dict[str, Any]) -> list[str]:
    keys = []
    for ev in module["evaluations"]:
        for b in ev.get("measures", ()):
            k = f"{MID}/{b['measure']}" + (f"@{MID}/{b['normaliser']}" if b.get("normaliser") else "")
            if k not in keys:
                keys.append(k)
    return keys


def evaluate(module: dict[str, Any], raw: dict[str, float], derived: dict[str, float] | None = None) -> float:
    """Root utility by plain recursion.  Every binding must have a value."""
    evs = {e["owner"]: e for e in module["evaluations"]}

    def value(b: dict[str, Any]) -> float:
        key = f"{MID}/{b['measure']}" + (f"@{MID}/{b['normaliser']}" if b.get("normaliser") else "")
        if derived is not None:
            return derived[key]
        v = raw[f"{MID}/{b['measure']}"]
        if b.get("normaliser"):
            v = v / raw[f"{MID}/{b['normaliser']}"]
        return v

    def weights(ev: dict[str, Any], n: int) -> list[float]:
        w = ev["weights"]
        return list(w["weights"]) if w["mode"] == "explicit" else roc(w["ranks"])

    def util(fid: str) -> float:
        ev = evs[fid]
        if ev.get("measures"):
            parts = [clamp_lerp(b["utility"]["shape"], b["utility"]["min"], b["utility"]["max"], value(b))
                     for b in ev["measures"]]
        else:
            parts = [util(c) for c in ev["children"]]
        total = sum(w * u for w, u in zip(weights(ev, len(parts)), parts))
        return min(1.0, max(0.0, total))

    return util(module["root_aspect"])
