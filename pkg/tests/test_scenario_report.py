import json
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import binary_specs
from zsv import fixtures
from zsv.correlation import CorrelationReport, classify
from zsv.equilibrium import verify
from zsv.model import StrategyProfile, realize_core
from zsv.report import CSV, MACHINE, TEXT, emit, render, signed
from zsv.scenario import (Scenario, ScenarioError, dumps, load, loads, parse, scenario_dict)
from zsv.simulate import exact_outcome, sweep

SCENARIO_DIR = __import__("pathlib").Path(__file__).resolve().parent.parent / "scenarios"


@pytest.mark.parametrize("name", sorted(fixtures.scenarios()))
def test_shipped_scenarios_match_fixtures(name):
    sc = load(SCENARIO_DIR / f"{name}.scenario")
    ref = fixtures.scenarios()[name]
    assert sc.problem == ref.problem
    assert sc.lam == ref.lam and sc.kind == ref.kind


@pytest.mark.parametrize("name", sorted(fixtures.scenarios()))
def test_scenario_round_trip(name):
    sc = fixtures.scenarios()[name]
    back = loads(dumps(scenario_dict(sc)))
    assert back.problem == sc.problem and back.lam == sc.lam and back.fraction == sc.fraction


@given(binary_specs())
def test_random_binary_round_trip(spec):
    sc = Scenario("binary", spec, F(1, 5))
    assert loads(dumps(scenario_dict(sc))).problem == spec


def test_explicit_round_trip():
    core = realize_core(fixtures.intro())
    sc = Scenario("explicit", core, F(1, 4))
    back = loads(dumps(scenario_dict(sc)))
    assert back.problem == core


def test_winner_count_form():
    text = '{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 3}, "winners": {"count": 2}}'
    assert loads(text).problem == fixtures.intro()


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"kind": "weird"}',
    '{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 3}}',
    '{"kind": "binary", "n": 3, "payoffs": {"vw": "x", "vl": 3}, "winners": {"count": 2}}',
    '{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 3}, "winners": {"dist": [1]}}',
    '{"kind": "binary", "n": 4, "payoffs": {"vw": 2, "vl": 3}, "winners": {"count": 2}}',
    '{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 3}, "winners": {"count": 2}, "lambda": 2}',
    '{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 3}, "winners": {"count": 2}, "signals": "telepathy"}',
    '{"kind": "elite", "n": 3, "payoffs": {"vw": 2, "vl": 3}, "winners": {"count": 2}}',
    '{"kind": "explicit", "n": 3}',
])
def test_bad_scenarios(text):
    with pytest.raises(ScenarioError):
        loads(text)


def test_structured_text_numbers():
    assert parse(dumps({"a": F(1, 3), "b": [F(2), F(-1, 2)], "c": 0.1 + 0.2})) == {
        "a": F(1, 3), "b": [F(2), F(-1, 2)], "c": 0.3}
    assert '"b": ["2", "-1/2"]' in dumps({"b": [F(2), F(-1, 2)]})


def test_machine_report_round_trips():
    for spec in (fixtures.intro(), fixtures.agg5(), fixtures.strong5()):
        rep = classify(spec)
        assert CorrelationReport.from_dict(parse(render(rep, MACHINE))) == rep


def test_text_forms():
    assert render(classify(fixtures.intro())).splitlines()[0] == "Adverse (κ*=1), K* sign −"
    res = verify(fixtures.intro(), StrategyProfile.symmetric(3, F(0)), F(1, 4))
    text = render(res, TEXT)
    assert "strict equilibrium" in text
    assert text.count("Pi=-1/24") == 3
    assert signed(F(1, 3)) == "+1/3" and signed(F(-2)) == "-2" and signed(0) == "0"


def test_equilibrium_csv():
    res = verify(fixtures.intro(), StrategyProfile.symmetric(3, F(0)), F(1, 4))
    lines = render(res, CSV).splitlines()
    assert lines[0] == "voter,sigma,pi,margin"
    assert lines[1] == "0,0,-1/24,1/24"


def test_sweep_csv_header_and_cells():
    t = sweep(fixtures.intro(), "lambda", [F(1, 4), F(2, 5)], "suspicious")
    lines = render(t, CSV).splitlines()
    assert lines[0] == "param,profile,pi_min_margin,is_equilibrium,p_star_win"
    assert lines[1].startswith("0.25,sigma^0,")
    assert lines[1].endswith(",true,0.0625")
    assert ",false," in lines[2]


def test_outcome_forms():
    out = exact_outcome(fixtures.intro(), StrategyProfile.symmetric(3, F(0)), F(1, 4))
    assert render(out).startswith("P(p* wins) = 1/16 (exact)")
    assert render(out, CSV).splitlines()[0] == "votes,prob"
    assert sum(F(r.split(",")[1]) for r in render(out, CSV).splitlines()[1:]) == 1


def test_emit_is_stable_bytes():
    rep = classify(fixtures.asym5())
    assert emit(rep, MACHINE) == emit(classify(fixtures.asym5()), MACHINE)
    json.loads(emit(rep, MACHINE))
    with pytest.raises(ValueError):
        render(rep, "yaml")
