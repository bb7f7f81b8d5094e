import json

import pytest

from hahnlab.formatter import export_file, format_json, format_output, format_report_text, format_text


def make_report(scenario="demo-1", checks=None):
    return {
        "schema": 1,
        "scenario": scenario,
        "title": "Demo",
        "prime": 3,
        "field": "FieldSpec(p=3, m=1)",
        "config": {"prime": 3},
        "notes": ["sampled evidence only"],
        "checks": checks if checks is not None else [],
    }


def check(id_, status, expected=1, computed=1):
    return {
        "id": id_,
        "description": f"{id_} holds",
        "paper_ref": "ref",
        "provenance": "source",
        "expected": expected,
        "computed": computed,
        "status": status,
    }


def test_empty_report_is_valid_json():
    data = json.loads(format_json(make_report()))
    assert data["checks"] == []
    assert data["schema"] == 1


def test_json_single_object_or_array():
    one = format_json([make_report()])
    assert json.loads(one)["scenario"] == "demo-1"
    both = json.loads(format_json([make_report("a-1"), make_report("b-1")]))
    assert [r["scenario"] for r in both] == ["a-1", "b-1"]


def test_json_is_stable():
    report = make_report(checks=[check("x", "PASS", {"b": 1, "a": 2})])
    assert format_json(report) == format_json(dict(reversed(list(report.items()))))
    assert format_json(report).endswith("}\n")


def test_text_markers_and_details():
    report = make_report(checks=[
        check("good", "PASS"),
        check("bad", "FAIL", expected=[1], computed=[2]),
        check("slow", "INCONCLUSIVE", computed="budget exhausted: x"),
    ])
    text = format_report_text(report)
    lines = text.splitlines()
    assert lines[0] == "demo-1: Demo (p=3)"
    assert "  [PASS] good  good holds" in lines
    assert "  [FAIL] bad  bad holds" in lines
    assert "  [????] slow  slow holds" in lines
    assert "         expected:  [1]" in lines
    assert "         computed:  [2]" in lines
    assert "         computed:  budget exhausted: x" in lines
    assert "  note: sampled evidence only" in lines
    assert lines[-1] == "  1 PASS, 1 FAIL, 1 INCONCLUSIVE"
    assert text.count("paper_ref:") == 2


def test_text_summary_line():
    reports = [make_report("a-1", [check("x", "PASS")]), make_report("b-1", [check("y", "FAIL")])]
    text = format_text(reports)
    assert text.endswith("Summary: 2 scenario(s), 2 check(s): 1 PASS, 1 FAIL, 0 INCONCLUSIVE\n")


def test_format_output_dispatch():
    report = make_report()
    assert format_output(report, "JSON") == format_json(report)
    assert format_output(report, "text") == format_text(report)
    with pytest.raises(ValueError, match="Unsupported format: yaml"):
        format_output(report, "yaml")


def test_export_file(tmp_path):
    target = tmp_path / "report.json"
    export_file(format_json(make_report()), str(target))
    assert json.loads(target.read_text(encoding="utf-8"))["scenario"] == "demo-1"
