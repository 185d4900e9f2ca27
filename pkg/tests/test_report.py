import json

from hypothesis import given, settings
from hypothesis import strategies as st

from backend.config import CaseStatus, ReportFormat
from backend.report import CaseRecord, Report, emit_report


def _record(case_id: str, status: CaseStatus = CaseStatus.PASS, runtime_ms: float = 1.0) -> CaseRecord:
    return CaseRecord(case_id=case_id, suite=case_id.split("/")[0], status=status, runtime_ms=runtime_ms)


reports = st.lists(
    st.tuples(st.sampled_from(["a/m=3", "a/m=4", "b/m=3", "c/m=5"]), st.sampled_from(list(CaseStatus))),
    max_size=4,
).map(lambda items: Report(cases=[_record(case_id, status) for case_id, status in items]))


def test_empty_report():
    report = Report()
    data = report.to_dict()
    assert data["cases"] == []
    assert data["summary"] == {"pass": 0, "fail": 0, "skipped-budget": 0, "skipped-pole": 0}
    assert report.exit_code == 0


def test_summary_and_exit_code():
    report = Report(
        cases=[
            _record("a/m=3"),
            _record("a/m=4", CaseStatus.SKIPPED_POLE),
            _record("b/m=3", CaseStatus.FAIL),
        ]
    )
    assert report.summary == {"pass": 1, "fail": 1, "skipped-budget": 0, "skipped-pole": 1}
    assert report.failed
    assert report.exit_code == 1


def test_skips_do_not_fail_the_run():
    report = Report(cases=[_record("a/m=4", CaseStatus.SKIPPED_BUDGET)])
    assert report.exit_code == 0


def test_digest_ignores_runtime():
    fast = Report(cases=[_record("a/m=3", runtime_ms=1.0)])
    slow = Report(cases=[_record("a/m=3", runtime_ms=900.0)])
    assert fast.digest() == slow.digest()
    assert fast.to_json() != slow.to_json()
    assert "runtime_ms" not in fast.to_dict(runtime=False)["cases"][0]


def test_cases_are_sorted_in_output():
    report = Report(cases=[_record("b/m=3"), _record("a/m=3")])
    assert [case["case_id"] for case in report.to_dict()["cases"]] == ["a/m=3", "b/m=3"]


def test_merge_right_operand_wins():
    left = Report(config={"seed": 0}, cases=[_record("a/m=3", CaseStatus.FAIL)])
    right = Report(config={"budget": 10}, cases=[_record("a/m=3"), _record("b/m=3")])
    merged = left.merge(right)
    assert [case.case_id for case in merged.cases] == ["a/m=3", "b/m=3"]
    assert merged.cases[0].status is CaseStatus.PASS
    assert merged.config == {"seed": 0, "budget": 10}


@settings(max_examples=50, deadline=None)
@given(reports, reports, reports)
def test_merge_is_associative(a, b, c):
    assert a.merge(b).merge(c).digest() == a.merge(b.merge(c)).digest()


@settings(max_examples=50, deadline=None)
@given(reports)
def test_merge_with_empty_is_identity(a):
    assert a.merge(Report()).digest() == Report().merge(a).digest() == a.merge(a).digest()


def test_text_format_lists_cases_and_counts():
    report = Report(cases=[_record("a/m=3"), _record("b/m=3", CaseStatus.SKIPPED_POLE)])
    text = report.to_text()
    assert "a/m=3" in text
    assert "skipped-pole: 1" in text
    assert f"digest {report.digest()}" in text


def test_emit_report_writes_json(tmp_path):
    path = tmp_path / "report.json"
    report = Report(cases=[_record("a/m=3")])
    text = emit_report(report, path, ReportFormat.JSON)
    data = json.loads(path.read_text())
    assert data["summary"]["pass"] == 1
    assert data["schema"] == 1
    assert json.loads(text) == data


def test_emit_report_without_path_only_returns_text(tmp_path):
    text = emit_report(Report(), None, ReportFormat.TEXT)
    assert text.startswith("engine ")
    assert list(tmp_path.iterdir()) == []
