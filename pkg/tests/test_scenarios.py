import re

import pytest

from hahnlab.formatter import format_json
from hahnlab.runner import (
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    FAIL,
    INCONCLUSIVE,
    PASS,
    RunConfig,
    build_scenario,
    exit_code,
    get_available_scenarios,
    run_all,
    run_scenario,
)
from hahnlab.scenarios.monster import Monster


@pytest.fixture(scope="module")
def reports():
    return {r["scenario"]: r for r in run_all(config=RunConfig())}


def checks_of(report):
    return {c["id"]: c for c in report["checks"]}


@pytest.mark.parametrize("scenario_id", get_available_scenarios())
def test_every_check_passes(reports, scenario_id):
    report = reports[scenario_id]
    failing = [(c["id"], c["expected"], c["computed"]) for c in report["checks"] if c["status"] != PASS]
    assert failing == []
    assert report["checks"]


def test_exit_code_of_full_run(reports):
    assert exit_code(list(reports.values())) == EXIT_OK


def test_check_ids_are_unique(reports):
    for report in reports.values():
        ids = [c["id"] for c in report["checks"]]
        assert len(ids) == len(set(ids))


CITATION = re.compile(r"^§\d+(\.\d+)*\b.*\"[^\"]+\"")


@pytest.mark.parametrize("scenario_id", get_available_scenarios())
def test_every_check_cites_a_section_and_quote(reports, scenario_id):
    uncited = [c["id"] for c in reports[scenario_id]["checks"] if not CITATION.match(c["paper_ref"])]
    assert uncited == []


def test_dependent_pair_distances(reports):
    checks = checks_of(reports["example-5-1-1"])
    assert checks["beta-distance-values"]["computed"] == ["-10/9", "-28/27", "-82/81", "-244/243", "-730/729"]
    assert checks["alpha-distance-values"]["computed"] == [
        "-1/9*pi", "-1/27*pi", "-1/81*pi", "-1/243*pi", "-1/729*pi"]
    assert checks["d1-cuts"]["computed"] == {"alpha": "0^-", "beta": "-1^-"}
    assert checks["s-theta"]["computed"] == {"values": ["0"], "multiset": {"0": 8}}
    assert checks["depth-evidence"]["computed"]["depth"] == 2


def test_monster_values(reports):
    checks = checks_of(reports["monster-5-2"])
    assert "equianfgmarl-nonmembership" in checks
    assert checks["s-theta"]["computed"] == {"values": ["0", "1"], "multiset": {"0": 6, "1": 2}}
    assert checks["krasner-omega"]["computed"] == "1"
    assert checks["depth-evidence"]["computed"]["depth"] == 1


def test_compositum_comparison(reports):
    checks = checks_of(reports["ramif-6-2"])
    assert checks["ideal-h1"]["computed"]["segment"] == "AboveOpen(0)"
    assert checks["ideal-h2"]["computed"]["segment"] == "AboveOpen(1)"
    assert checks["ram-comparison"]["computed"]["summary"] == "#Ram >= 2 > 1 = depth"


def test_heisenberg_single_ideal(reports):
    checks = checks_of(reports["asd-6-3"])
    assert checks["group-law"]["computed"]["order"] == 27
    assert checks["subgroups"]["computed"]["total"] == 19
    assert checks["ram"]["computed"]["ram"] == ["AboveOpen(0)"]
    assert checks["lemma-iv-as-stated"]["computed"] is False


def test_unsupported_prime():
    with pytest.raises(ValueError, match="supports primes"):
        build_scenario("monster-5-2", RunConfig(prime=2))
    with pytest.raises(ValueError, match="supports primes"):
        build_scenario("asd-6-3", RunConfig(prime=7))


def test_scenarios_carry_recipes():
    scenario = build_scenario("example-5-1-1")
    assert {"a", "alpha", "beta", "theta"} <= set(scenario.recipes)
    assert scenario.recipes["a"].indexed


def test_reports_are_deterministic():
    config = RunConfig(levels=3)
    first = format_json(run_scenario("example-5-1-1", config))
    second = format_json(run_scenario("example-5-1-1", config))
    assert first == second


def test_single_level_is_inconclusive_not_failing():
    report = run_scenario("example-5-1-1", RunConfig(levels=1))
    checks = checks_of(report)
    assert [c["id"] for c in report["checks"] if c["status"] == FAIL] == []
    for check_id in ("d1-cuts", "dependence-classes", "depth-evidence"):
        assert checks[check_id]["status"] == INCONCLUSIVE
        assert checks[check_id]["computed"].startswith("insufficient evidence")
    assert exit_code([report]) == EXIT_INCONCLUSIVE


def test_single_level_in_characteristic_two_leaves_ram_open():
    checks = checks_of(run_scenario("example-5-1-1", RunConfig(prime=2, levels=1)))
    assert checks["ram-lower-bound"]["status"] == INCONCLUSIVE


@pytest.mark.parametrize("prime, count", [(3, 2), (5, 1)])
def test_monster_small_powers(prime, count):
    assert Monster(RunConfig(prime=prime)).small_powers() == count
