from fractions import Fraction

import pytest

from hahnlab import runner
from hahnlab.coefficients import FieldSpec
from hahnlab.cuts import MINUS, UnsettledCut, principal
from hahnlab.exponents import BasisContext, RefinementBudgetExceeded
from hahnlab.runner import (
    EXIT_FAIL,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    FAIL,
    INCONCLUSIVE,
    PASS,
    SCHEMA_VERSION,
    Check,
    RunConfig,
    Scenario,
    exit_code,
    get_available_scenarios,
    get_scenario_function,
    normalize,
    run_all,
    run_check,
    summarize,
    validate_scenarios,
)
from hahnlab.series import TermBudgetExceeded

CTX = BasisContext(3)


def raises(exc):
    def compute():
        raise exc
    return compute


def fake_builder(config):
    return Scenario(
        id="fake-1",
        title="Fake scenario",
        prime=config.prime,
        base_field=FieldSpec(3, 1),
        context=CTX,
        checks=[
            Check("ok", "passes", "ref", 1, lambda: 1),
            Check("budget", "runs out", "ref", 1, raises(TermBudgetExceeded("too many terms"))),
        ],
        notes=["a note"],
    )


@pytest.fixture
def fake_registry(monkeypatch):
    monkeypatch.setattr(runner, "SCENARIO_MODULE_MAP", {"fake-1": "fake"})
    monkeypatch.setattr(runner, "get_scenario_function", lambda s: fake_builder if s == "fake-1" else None)


# --- registry ---

def test_available_scenarios():
    assert get_available_scenarios() == ["asd-6-3", "example-5-1-1", "monster-5-2", "ramif-6-2"]
    assert get_scenario_function("nope") is None
    assert callable(get_scenario_function("monster-5-2"))


def test_unknown_scenario_suggests_close_match():
    with pytest.raises(ValueError, match="Did you mean: monster-5-2"):
        validate_scenarios(["monster-5-3"])
    with pytest.raises(ValueError, match="list-scenarios"):
        validate_scenarios(["zzz"])
    validate_scenarios(["MONSTER-5-2"])


def test_run_config_validation():
    RunConfig().validate()
    with pytest.raises(ValueError, match="'levels' must be positive"):
        RunConfig(levels=0).validate()
    assert RunConfig().as_dict()["prime"] == 3


# --- checks ---

def test_normalize():
    assert normalize(None) is None
    assert normalize({CTX.zero(): 6, CTX.rational(1): 2}) == {"0": 6, "1": 2}
    assert normalize([CTX.pi(Fraction(-1, 9)), principal(CTX.zero(), MINUS)]) == ["-1/9*pi", "0^-"]
    assert normalize({"b", "a"}) == ["a", "b"]
    assert normalize((True, 3)) == [True, 3]


def test_run_check_statuses():
    assert run_check(Check("a", "d", "r", [CTX.zero()], lambda: [CTX.zero()]))["status"] == PASS
    failed = run_check(Check("b", "d", "r", 1, lambda: 2))
    assert failed["status"] == FAIL
    assert (failed["expected"], failed["computed"]) == (1, 2)


def test_run_check_custom_compare():
    check = Check("c", "d", "r", 10, lambda: 12, compare=lambda expected, raw: raw >= expected)
    assert run_check(check)["status"] == PASS


def test_budget_exhaustion_is_inconclusive():
    result = run_check(Check("d", "d", "r", 1, raises(RefinementBudgetExceeded("no decision"))))
    assert result["status"] == INCONCLUSIVE
    assert result["computed"].startswith("budget exhausted")


def test_unsettled_cut_is_inconclusive():
    result = run_check(Check("u", "d", "r", "0^-", raises(UnsettledCut("witnesses limsup{-1} do not settle"))))
    assert result["status"] == INCONCLUSIVE
    assert result["computed"] == "insufficient evidence: witnesses limsup{-1} do not settle"


def test_other_errors_fail():
    result = run_check(Check("e", "d", "r", 1, raises(ZeroDivisionError("boom"))))
    assert result["status"] == FAIL
    assert result["computed"] == "error: boom"


def test_exit_code():
    def report(*statuses):
        return {"checks": [{"status": s} for s in statuses]}

    assert exit_code([report(PASS, PASS)]) == EXIT_OK
    assert exit_code([report(PASS), report(INCONCLUSIVE)]) == EXIT_INCONCLUSIVE
    assert exit_code([report(INCONCLUSIVE), report(FAIL)]) == EXIT_FAIL
    assert exit_code([report()]) == EXIT_OK


# --- runs ---

def test_run_scenario_report(fake_registry):
    report = runner.run_scenario("fake-1", RunConfig(prime=5))
    assert report["schema"] == SCHEMA_VERSION
    assert report["scenario"] == "fake-1" and report["prime"] == 5
    assert report["config"]["prime"] == 5
    assert report["notes"] == ["a note"]
    assert [c["id"] for c in report["checks"]] == ["ok", "budget"]
    assert summarize(report) == {PASS: 1, FAIL: 0, INCONCLUSIVE: 1}


def test_run_all_reports_progress(fake_registry):
    seen = []
    reports = run_all(["fake-1"], progress_callback=lambda s, status: seen.append((s, status)))
    assert len(reports) == 1
    assert seen == [("fake-1", "Done: 1 PASS, 0 FAIL, 1 INCONCLUSIVE")]
    assert exit_code(reports) == EXIT_INCONCLUSIVE


def test_run_all_rejects_unknown(fake_registry):
    with pytest.raises(ValueError, match="Unknown scenario"):
        run_all(["fake-2"])
