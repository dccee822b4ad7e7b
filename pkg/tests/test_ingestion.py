from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qme.errors import DuplicateMeasureValue, MalformedRecord
from qme.ingestion import (
    FindingRecord,
    MetricRecord,
    ingest_findings,
    ingest_metrics,
    merge,
    read_findings,
    read_metrics,
)


def test_example_findings_are_counted(example_model, example_dir):
    recs = list(read_findings(example_dir / "system" / "findings.csv"))
    part = ingest_findings(recs, example_model)
    assert part.raw == {"java/doomed-nan": 6.0, "java/float-equality": 9.0, "java/string-identity": 4.0}
    assert part.matched == 19 and part.unmatched == 1
    assert part.warnings == ["1 finding(s) of FindBugs/DLS_DEAD_LOCAL_STORE matched no instrument"]


def test_clean_tool_run_counts_zero(example_model):
    part = ingest_findings([], example_model, tools_ran=["FindBugs"])
    assert part.raw == {"java/doomed-nan": 0.0, "java/float-equality": 0.0, "java/string-identity": 0.0}
    assert ingest_findings([], example_model).raw == {}


def test_matching_is_case_sensitive(example_model):
    part = ingest_findings([FindingRecord("findbugs", "FE_FLOATING_POINT_EQUALITY")], example_model)
    assert part.raw == {} and part.unmatched == 1


rules = st.sampled_from([
    ("FindBugs", "FE_FLOATING_POINT_EQUALITY"),
    ("FindBugs", "FE_TEST_IF_EQUAL_TO_NOT_A_NUMBER"),
    ("PMD", "CommentRequired"),
    ("PMD", "Unknown"),
    ("Other", "X"),
])


@given(st.lists(rules, max_size=60))
def test_findings_are_conserved(example_model, pairs):
    part = ingest_findings([FindingRecord(t, r) for t, r in pairs], example_model)
    assert part.matched + part.unmatched == len(pairs)


def test_metrics(example_model, example_dir):
    part = ingest_metrics(read_metrics(example_dir / "system" / "metrics.csv"), example_model)
    assert part.raw["core/loc"] == 2_759_369.0
    part = ingest_metrics([MetricRecord("core/loc", 1.0), MetricRecord("nope/x", 2.0)], example_model)
    assert part.warnings == ["metric for unknown measure nope/x ignored"]


def test_metric_problems(example_model):
    with pytest.raises(DuplicateMeasureValue):
        ingest_metrics([MetricRecord("core/loc", 1.0), MetricRecord("core/loc", 2.0)], example_model)
    with pytest.raises(MalformedRecord):
        ingest_metrics([MetricRecord("java/doomed-nan", 1.5)], example_model)
    with pytest.raises(MalformedRecord):
        ingest_metrics([MetricRecord("java/doomed-nan", -1)], example_model)


def test_merge_refuses_two_sources_for_one_measure(example_model):
    f = ingest_findings([FindingRecord("FindBugs", "FE_FLOATING_POINT_EQUALITY")], example_model)
    m = ingest_metrics([MetricRecord("java/float-equality", 3.0)], example_model)
    with pytest.raises(DuplicateMeasureValue):
        merge("s", [f, m])
    ds = merge("s", [f, ingest_metrics([MetricRecord("core/loc", 10.0)], example_model)])
    assert ds.raw == {"core/loc": 10.0, "java/float-equality": 1.0}


@pytest.mark.parametrize(
    "name,text",
    [
        ("findings", "tool,rule\n"),
        ("findings", "tool,rule,path,line,message\nFindBugs,,a.java,1,m\n"),
        ("findings", "tool,rule,path,line,message\nFindBugs,R,a.java,one,m\n"),
        ("findings", "tool,rule,path,line,message\nFindBugs,R,a.java\n"),
        ("metrics", "measure_id,value\ncore/loc,abc\n"),
        ("metrics", "measure_id,value\ncore/loc,nan\n"),
        ("metrics", "measure_id,value\n,1\n"),
    ],
)
def test_malformed_files(tmp_path, name, text):
    p = tmp_path / f"{name}.csv"
    p.write_text(text)
    reader = read_findings if name == "findings" else read_metrics
    with pytest.raises(MalformedRecord):
        list(reader(p))


def test_row_numbers_in_errors(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("measure_id,value\ncore/loc,1\n\ncore/classes,x\n")
    with pytest.raises(MalformedRecord) as info:
        list(read_metrics(p))
    assert info.value.row == 4
