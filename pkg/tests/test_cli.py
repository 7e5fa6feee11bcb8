import shutil
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from zsv.cli import main, parse_profile
from zsv.model import SpecError, StrategyProfile
from zsv.scenario import parse

SC = Path(__file__).resolve().parent.parent / "scenarios"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_intro(capsys):
    code, out, _ = run(capsys, "analyze", SC / "intro.scenario")
    assert code == 0
    assert out.splitlines()[0] == "Adverse (κ*=1), K* sign −"


def test_analyze_machine_form_parses(capsys):
    code, out, _ = run(capsys, "analyze", SC / "asym5.scenario", "--format", "machine")
    assert code == 0
    d = parse(out)
    assert d["classification"] == "Adverse" and d["kappa_star"] == 1


def test_equilibria_brute_force(capsys):
    code, out, _ = run(capsys, "equilibria", SC / "intro.scenario", "--lambda", "1/4", "--brute-force")
    assert code == 0
    listing = out.split("pure equilibria by enumeration")[1]
    assert "sigma^0  strict" in listing
    assert "sigma^1  strict" in listing


def test_equilibria_profile_and_symmetric(capsys):
    code, out, _ = run(capsys, "equilibria", SC / "intro.scenario", "--lambda", "1/2", "--profile", "sigma^0")
    assert code == 0 and "not an equilibrium" in out
    code, out, _ = run(capsys, "equilibria", SC / "strong5.scenario", "--lambda", "1/100", "--symmetric")
    assert code == 0 and "alpha=" in out


def test_profile_parsing(tmp_path):
    assert parse_profile("alpha=1/3", 3) == StrategyProfile.symmetric(3, F(1, 3))
    assert parse_profile("sanguine:1", 3).probs == (1, 0, 0)
    assert parse_profile("pure:101", 3).probs == (1, 0, 1)
    assert parse_profile("mixed:1/2;0;1", 3).probs == (F(1, 2), 0, 1)
    f = tmp_path / "p.json"
    f.write_text('{"probs": ["1", "1/4", "0"]}')
    assert parse_profile(str(f), 3).probs == (1, F(1, 4), 0)
    with pytest.raises(SpecError):
        parse_profile("pure:10", 3)
    with pytest.raises(SpecError):
        parse_profile("hopeful", 3)


def test_simulate_exact_and_mc(capsys):
    code, out, _ = run(capsys, "simulate", SC / "intro.scenario", "--exact")
    assert code == 0 and out.startswith("P(p* wins) = 1/16 (exact)")
    args = ("simulate", SC / "intro.scenario", "--trials", "20000", "--seed", "9")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second and first[0] == 0
    assert "monte_carlo, 20000 trials, seed 9" in first[1]


def test_sweep_output_and_plot(capsys, tmp_path):
    csv_path = tmp_path / "intro_sweep.csv"
    code, out, err = run(capsys, "sweep", SC / "intro.scenario", "--param", "lambda", "--from", "0.05",
                         "--to", "0.35", "--steps", "7", "--output", csv_path, "--plot")
    assert code == 0 and out == ""
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "param,profile,pi_min_margin,is_equilibrium,p_star_win"
    assert [l.split(",")[3] for l in lines[1:]] == ["true"] * 6 + ["false"]
    png = tmp_path / "intro_sweep.png"
    assert png.read_bytes()[:8] == PNG_MAGIC
    assert str(png) in err


def test_n_sweep_to_stdout(capsys):
    code, out, _ = run(capsys, "sweep", SC / "frac101.scenario", "--param", "n", "--from", "101",
                       "--to", "301", "--steps", "3", "--lambda", "1/4")
    assert code == 0
    assert [l.split(",")[0] for l in out.splitlines()[1:]] == ["101", "201", "301"]


def test_reproduce_table(capsys, tmp_path):
    code, out, err = run(capsys, "reproduce", "--output", tmp_path, "--plot")
    assert code == 0
    assert "λ-threshold INTRO σ^0 = 1/3 : PASS" in out.splitlines()
    assert "FAIL" not in out
    assert (tmp_path / "reproduce.csv").exists()
    pngs = sorted(tmp_path.glob("*.png"))
    assert pngs and all(p.read_bytes()[:8] == PNG_MAGIC for p in pngs)


@pytest.mark.parametrize("argv", [
    ["analyze"],
    ["analyze", "x.scenario", "--bogus"],
    ["frobnicate"],
    ["sweep", "x.scenario", "--param", "mu", "--from", "0", "--to", "1", "--steps", "2"],
    ["simulate", "x.scenario", "--lambda", "abc"],
])
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1


def test_validation_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.scenario"
    bad.write_text('{"kind": "binary", "n": 3, "payoffs": {"vw": 2, "vl": 5}, "winners": {"count": 2}}')
    code, _, err = run(capsys, "analyze", bad)
    assert code == 1 and "ex-ante optimality" in err
    code, _, _ = run(capsys, "simulate", SC / "intro.scenario", "--lambda", "3/2")
    assert code == 1
    code, _, _ = run(capsys, "equilibria", SC / "agg5.scenario", "--lambda", "1/4", "--profile", "pure:11")
    assert code == 1


def test_numeric_failure_exits_2(capsys):
    code, _, err = run(capsys, "equilibria", SC / "frac101.scenario", "--lambda", "1/4", "--brute-force")
    assert code == 2 and "numeric failure" in err


def test_io_failure_exits_3(capsys, tmp_path):
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.scenario")
    assert code == 3
    code, _, _ = run(capsys, "sweep", SC / "intro.scenario", "--param", "lambda", "--from", "0.1", "--to",
                     "0.2", "--steps", "2", "--output", tmp_path / "no" / "such" / "dir.csv")
    assert code == 3


def test_numeric_mode_env(capsys, monkeypatch):
    monkeypatch.setenv("ZSV_NUM_MODE", "float")
    code, out, _ = run(capsys, "simulate", SC / "intro.scenario")
    assert code == 0 and out.startswith("P(p* wins) = 0.0625")
    monkeypatch.setenv("ZSV_NUM_MODE", "bogus")
    assert run(capsys, "simulate", SC / "intro.scenario")[0] == 1


@pytest.mark.skipif(shutil.which("zsv") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["zsv", "analyze", str(SC / "agg5.scenario")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("Advantageous")
    proc = subprocess.run([sys.executable, "-m", "zsv", "analyze", str(SC / "agg5.scenario")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
