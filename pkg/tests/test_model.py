from __future__ import annotations

import copy
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from helpers import build, module, tiny
from qme.errors import (
    AmbiguousRoot,
    CyclicModuleDependency,
    DuplicateId,
    MissingRequires,
    ModelFormatError,
    UnresolvedReference,
)
from qme.model import (
    dumps_module,
    link,
    load_modules,
    model_digest,
    module_from_dict,
    module_to_dict,
    validate,
)
from qme.model.io import load_module
from qme.model.validate import errors


def rules(findings):
    return sorted({(f.level, f.rule) for f in findings})


# -- loading ------------------------------------------------------------------------------


def test_local_ids_get_module_prefix():
    m, _ = module_from_dict(tiny())
    assert {f.id for f in m.factors} == {"m/q", "m/pf"}
    assert m.impacts[0].source == "m/pf" and m.impacts[0].target == "m/q"
    assert m.evaluations[0].bindings[0].measure == "m/x"


def test_qualified_definition_in_foreign_namespace_is_rejected():
    d = tiny()
    d["factors"][0]["id"] = "other/q"
    with pytest.raises(ModelFormatError, match="namespaced outside"):
        module_from_dict(d)


def test_unknown_attribute_strict_vs_lenient():
    d = tiny()
    d["factors"][0]["colour"] = "blue"
    with pytest.raises(ModelFormatError):
        module_from_dict(d)
    m, warnings = module_from_dict(d, strict=False)
    assert len(m.factors) == 2
    assert warnings and "colour" in warnings[0]


def test_schema_violation_is_a_format_error():
    d = tiny()
    d["factors"][0]["kind"] = "aspect"
    with pytest.raises(ModelFormatError):
        module_from_dict(d)


def test_omitted_weights_mean_equal_ranks():
    m, _ = module_from_dict(tiny([
        {"measure": "a", "utility": {"shape": "linear_decreasing", "min": 0, "max": 1}},
        {"measure": "b", "utility": {"shape": "linear_decreasing", "min": 0, "max": 1}},
    ]))
    ev = m.evaluations[0]
    assert ev.weights.mode == "ranked" and ev.weights.ranks == (1, 1)


def test_dump_load_round_trip(example_model):
    for m in example_model.modules:
        again, _ = module_from_dict(json.loads(dumps_module(m)))
        assert again == m


def test_load_from_directory_and_bad_json(tmp_path, example_dir):
    mods, warnings = load_modules([example_dir / "model"])
    assert sorted(m.id for m in mods) == ["base", "core", "csharp", "java"]
    assert warnings == []
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ModelFormatError, match="not valid JSON"):
        load_module(bad)


# -- linking --------------------------------------------------------------------------------


def _two_modules():
    a = module(
        "a",
        root_aspect="q",
        entities=[{"id": "product", "name": "p"}],
        factors=[{"id": "q", "name": "Q", "kind": "quality_aspect", "entity": "product"}],
    )
    b = module(
        "b",
        requires=["a"],
        measures=[{"id": "x", "name": "x", "value_kind": "findings_count"}],
        factors=[{"id": "pf", "name": "PF", "kind": "product_factor", "entity": "a/product"}],
        impacts=[{"source": "pf", "target": "a/q", "polarity": "negative"}],
        evaluations=[{"owner": "pf", "measures": [
            {"measure": "x", "utility": {"shape": "linear_decreasing", "min": 0, "max": 1}}]}],
    )
    return a, b


def test_link_across_modules():
    model = build(*_two_modules())
    assert model.root_aspect == "a/q"
    assert model.impacts_on("a/q")[0].source == "b/pf"
    assert model.module_ids == ("a", "b")


def test_link_missing_requires():
    a, b = _two_modules()
    b["requires"] = []
    with pytest.raises(MissingRequires):
        build(a, b)


def test_link_unresolved_reference():
    a, b = _two_modules()
    b["impacts"][0]["target"] = "a/nothing"
    with pytest.raises(UnresolvedReference):
        build(a, b)


def test_link_reference_of_wrong_kind_is_unresolved():
    a, b = _two_modules()
    b["factors"][0]["entity"] = "a/q"
    with pytest.raises(UnresolvedReference, match="expected entity"):
        build(a, b)


def test_link_unknown_required_module():
    a, b = _two_modules()
    b["requires"] = ["a", "zzz"]
    with pytest.raises(UnresolvedReference):
        build(a, b)


def test_link_cyclic_requires():
    a, b = _two_modules()
    a["requires"] = ["b"]
    with pytest.raises(CyclicModuleDependency):
        build(a, b)


def test_link_duplicate_ids():
    a, b = _two_modules()
    with pytest.raises(DuplicateId):
        build(a, copy.deepcopy(a))
    b["impacts"].append(dict(b["impacts"][0]))
    with pytest.raises(DuplicateId):
        build(a, b)


def test_root_inference_and_ambiguity():
    a, b = _two_modules()
    del a["root_aspect"]
    assert build(a, b).root_aspect == "a/q"
    a["factors"].append({"id": "q2", "name": "Q2", "kind": "quality_aspect", "entity": "product"})
    with pytest.raises(AmbiguousRoot):
        build(a, b)
    a["root_aspect"] = "q"
    b["root_aspect"] = "a/q"
    assert build(a, b).root_aspect == "a/q"  # agreeing declarations are fine
    b["root_aspect"] = "a/q2"
    with pytest.raises(AmbiguousRoot):
        build(a, b)


@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_link_is_order_independent(seed, rnd):
    spec = oracle.random_model(random.Random(seed))
    m1, _ = module_from_dict(spec)
    shuffled = copy.deepcopy(spec)
    for key in ("factors", "measures", "impacts", "evaluations", "entities"):
        rnd.shuffle(shuffled[key])
    m2, _ = module_from_dict(shuffled)
    a, b = link([m1]), link([m2])
    assert a == b
    assert model_digest(a) == model_digest(b)


def test_module_order_does_not_matter(example_model):
    mods = list(example_model.modules)
    again = link(list(reversed(mods)))
    assert again == example_model
    assert model_digest(again) == model_digest(example_model)


def test_digest_changes_with_content():
    m1 = build(tiny())
    d = tiny()
    d["evaluations"][0]["measures"][0]["utility"]["max"] = 11
    assert model_digest(build(d)) != model_digest(m1)


def test_module_to_dict_uses_local_ids():
    m, _ = module_from_dict(tiny())
    d = module_to_dict(m)
    assert d["factors"][0]["id"] in ("q", "pf")
    assert "m/" not in json.dumps(d["impacts"])


# -- validation -----------------------------------------------------------------------------


def test_example_model_is_valid(example_model):
    assert errors(validate(example_model)) == []


def test_validation_never_reports_unresolved(example_model):
    assert all(f.rule != "unresolved" for f in validate(example_model))


def test_e1_impact_between_wrong_kinds():
    d = tiny()
    d["factors"].append({"id": "q2", "name": "Q2", "kind": "quality_aspect", "entity": "product", "refines": ["q"]})
    d["impacts"].append({"source": "q2", "target": "q", "polarity": "positive"})
    assert ("error", "E1") in rules(validate(build(d)))


def test_e2_refines_cycle_and_cross_kind():
    d = tiny()
    d["factors"] += [
        {"id": "a1", "name": "a1", "kind": "quality_aspect", "entity": "product", "refines": ["a2"]},
        {"id": "a2", "name": "a2", "kind": "quality_aspect", "entity": "product", "refines": ["a1"]},
    ]
    assert ("error", "E2") in rules(validate(build(d)))
    d = tiny()
    d["factors"][1]["refines"] = ["q"]
    assert ("error", "E2") in rules(validate(build(d)))


def test_e3_weight_problems():
    d = tiny(weights={"mode": "explicit", "weights": [0.5]})
    assert ("error", "E3") in rules(validate(build(d)))
    d = tiny(weights={"mode": "explicit", "weights": [0.5, 0.5]})
    assert ("error", "E3") in rules(validate(build(d)))
    d = tiny(weights={"mode": "ranked", "ranks": [0]})
    assert ("error", "E3") in rules(validate(build(d)))


def test_e4_thresholds_out_of_order():
    d = tiny([{"measure": "x", "utility": {"shape": "linear_decreasing", "min": 2, "max": 1}}])
    assert ("error", "E4") in rules(validate(build(d)))


def test_e5_normaliser_must_be_flagged():
    d = tiny([{"measure": "x", "normaliser": "y", "utility": {"shape": "linear_decreasing", "min": 0, "max": 1}}],
             extra_measures=[{"id": "y", "name": "y", "value_kind": "numeric"}])
    assert ("error", "E5") in rules(validate(build(d)))


def test_e6_root_must_be_an_aspect_on_the_product():
    d = tiny()
    d["factors"].append({"id": "q3", "name": "q3", "kind": "quality_aspect", "entity": "part", "refines": ["q"]})
    assert ("error", "E6") in rules(validate(build(d)))


def test_e7_evaluation_structure():
    d = tiny()
    d["evaluations"][1]["children"] = ["pf", "pf"]
    d["evaluations"][1]["weights"] = {"mode": "ranked", "ranks": [1, 2]}
    assert ("error", "E7") in rules(validate(build(d)))


def test_e8_tool_instrument_needs_tool_name():
    d = tiny()
    d["instruments"] = [{"id": "i", "measure": "x", "source": "tool"}]
    assert ("error", "E8") in rules(validate(build(d)))


def test_warnings_w1_w2_w3():
    d = tiny(extra_measures=[{"id": "unused", "name": "u", "value_kind": "numeric"}])
    d["evaluations"][0]["measures"][0]["utility"]["shape"] = "linear_increasing"
    found = rules(validate(build(d)))
    assert ("warning", "W1") in found
    assert ("warning", "W3") in found
    d = tiny()
    d["evaluations"] = [e for e in d["evaluations"] if e["owner"] != "pf"]
    assert ("warning", "W2") in rules(validate(build(d)))


def test_w4_aspect_without_evaluation():
    d = tiny()
    d["evaluations"] = [e for e in d["evaluations"] if e["owner"] != "q"]
    found = validate(build(d))
    assert ("warning", "W4") in rules(found)
    assert not errors(found)


def test_findings_sorted_errors_first():
    d = tiny(extra_measures=[{"id": "unused", "name": "u", "value_kind": "numeric"}],
             weights={"mode": "explicit", "weights": [0.2]})
    levels = [f.level for f in validate(build(d))]
    assert levels == sorted(levels, key=lambda lv: lv != "error")
