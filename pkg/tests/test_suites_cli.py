import json

import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from backend.config import CaseStatus, VectorSource
from backend.errors import BudgetExceeded
from backend.report import CaseRecord, Report
from backend.suites import (
    SUITES,
    Suite,
    SuiteConfig,
    case_id,
    expand_cases,
    run_case,
    run_suite,
    s_cases,
)
from main import main


def test_case_id_format():
    assert case_id("prop_B", {"m": 3, "k": 1, "s": 1}) == "prop_B/m=3,k=1,s=1"


def test_suite_config_validation():
    assert SuiteConfig(suite="clifford", m=[5, 3, 3]).m == [3, 5]
    with pytest.raises(ValidationError):
        SuiteConfig(suite="unknown")
    with pytest.raises(ValidationError):
        SuiteConfig(suite="clifford", m=[2])
    with pytest.raises(ValidationError):
        SuiteConfig(suite="prop_B", s=[-1])


def test_expand_cases():
    names = {name for name, _ in expand_cases(SuiteConfig(suite="all"))}
    assert names == set(SUITES)
    cases = expand_cases(SuiteConfig(suite="prop_B", k=[1], s=[0, 1]))
    assert cases == [("prop_B", {"m": 3, "k": 1, "s": 1})]
    alphas = [params["alpha"] for _, params in expand_cases(SuiteConfig(suite="prop_c_alpha", k=[1]))]
    assert alphas == [0, 1, 3]


def test_run_case_passes_B_action_for_every_source():
    record = run_case("prop_B", {"m": 3, "k": 1, "s": 1}, SuiteConfig(suite="prop_B"))
    assert record.status is CaseStatus.PASS
    for source in VectorSource:
        assert record.details[source.value] is True
        assert record.details[f"{source.value}.d"] == "6"
    assert record.runtime_ms >= 0


def test_run_case_compares_c_alpha_across_sources():
    record = run_case("prop_c_alpha", {"m": 3, "k": 1, "alpha": 1}, SuiteConfig(suite="prop_c_alpha"))
    assert record.status is CaseStatus.PASS
    assert record.details["sources_agree"] is True
    assert record.details["random_combination.measured_constant"] == record.details["highest_weight.measured_constant"]


def test_run_case_telescoping_covers_every_source():
    record = run_case("telescoping", {"m": 3, "k": 1, "j": 2}, SuiteConfig(suite="telescoping"))
    assert record.status is CaseStatus.PASS
    assert all(record.details[source.value] for source in VectorSource)


def test_run_case_reports_pole_as_skip(caplog):
    record = run_case("prop_B", {"m": 4, "k": 0, "s": 1}, SuiteConfig(suite="prop_B"))
    assert record.status is CaseStatus.SKIPPED_POLE
    assert "Pole" in record.message
    assert "skipped" in caplog.text


def test_run_case_maps_errors(mocker):
    def over_budget(params, config):
        raise BudgetExceeded(10, 5)

    def broken(params, config):
        raise ZeroDivisionError("boom")

    config = SuiteConfig(suite="prop_B")
    mocker.patch.dict(SUITES, {"prop_B": Suite("prop_B", s_cases, over_budget)})
    assert run_case("prop_B", {"m": 3}, config).status is CaseStatus.SKIPPED_BUDGET
    mocker.patch.dict(SUITES, {"prop_B": Suite("prop_B", s_cases, broken)})
    record = run_case("prop_B", {"m": 3}, config)
    assert record.status is CaseStatus.FAIL
    assert record.message == "ZeroDivisionError: boom"


def test_run_suite_inline():
    report = run_suite(SuiteConfig(suite="clifford", m=[3]))
    assert [case.case_id for case in report.cases] == ["clifford/m=3"]
    assert report.exit_code == 0
    assert report.config["suite"] == "clifford"


def test_run_suite_with_workers_matches_inline():
    config = SuiteConfig(suite="clifford", m=[3, 4])
    assert run_suite(config, jobs=2).digest() == run_suite(config, jobs=1).digest()


def _silent_worker(cases, config, claimed, results):
    raise SystemExit(3)


def test_run_suite_fails_cases_lost_with_their_workers(mocker, caplog):
    mocker.patch("backend.suites._worker", _silent_worker)
    mocker.patch("backend.suites.WORKER_POLL_SECONDS", 0.1)
    report = run_suite(SuiteConfig(suite="clifford", m=[3, 4]), jobs=2)
    assert [case.case_id for case in report.cases] == ["clifford/m=3", "clifford/m=4"]
    assert all(case.status is CaseStatus.FAIL for case in report.cases)
    assert "exited with codes 3,3" in report.cases[0].message
    assert report.exit_code == 1
    assert "lost" in caplog.text


def test_empty_grid_is_a_passing_run():
    report = run_suite(SuiteConfig(suite="prop_B", s=[]))
    assert report.cases == []
    assert report.exit_code == 0


def _report(status: CaseStatus) -> Report:
    return Report(cases=[CaseRecord(case_id="prop_B/m=3", suite="prop_B", status=status)])


@pytest.mark.parametrize(
    "status, exit_code",
    [(CaseStatus.PASS, 0), (CaseStatus.SKIPPED_POLE, 0), (CaseStatus.FAIL, 1)],
)
def test_cli_exit_code_follows_report(mocker, tmp_path, status, exit_code):
    run = mocker.patch("main.run_suite", return_value=_report(status))
    path = tmp_path / "report.json"
    result = CliRunner().invoke(main, ["--suite", "prop_B", "--m", "3,4", "--report", str(path)])
    assert result.exit_code == exit_code
    config = run.call_args.args[0]
    assert config.m == [3, 4]
    assert json.loads(path.read_text())["cases"][0]["status"] == status.value


def test_cli_rejects_bad_grids(mocker):
    run = mocker.patch("main.run_suite")
    runner = CliRunner()
    assert runner.invoke(main, ["--suite", "prop_B", "--m", "3,x"]).exit_code == 2
    assert runner.invoke(main, ["--suite", "prop_B", "--m", "2"]).exit_code == 2
    assert runner.invoke(main, ["--suite", "nope"]).exit_code == 2
    run.assert_not_called()


def test_cli_unwritable_report_path(mocker, tmp_path):
    mocker.patch("main.run_suite", return_value=_report(CaseStatus.PASS))
    path = tmp_path / "missing" / "report.json"
    result = CliRunner().invoke(main, ["--suite", "prop_B", "--report", str(path)])
    assert result.exit_code == 2


def test_cli_empty_grid_writes_empty_report(tmp_path):
    path = tmp_path / "report.json"
    result = CliRunner().invoke(
        main, ["--suite", "prop_B", "--s", "", "--report", str(path), "--log-level", "error"]
    )
    assert result.exit_code == 0
    data = json.loads(path.read_text())
    assert data["cases"] == []
    assert data["summary"]["pass"] == 0


def test_cli_text_format(tmp_path):
    path = tmp_path / "report.txt"
    result = CliRunner().invoke(
        main, ["--suite", "clifford", "--m", "3", "--format", "text", "--report", str(path), "--jobs", "1"]
    )
    assert result.exit_code == 0
    assert "clifford/m=3" in path.read_text()
