import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import binary_specs, lambdas
from zsv import fixtures
from zsv.correlation import ADVANTAGEOUS, classify
from zsv.model import CapExceeded, StrategyProfile, realize_binary, realize_core
from zsv.oracle import oracle_outcome
from zsv.simulate import FracFamily, exact_outcome, monte_carlo, sweep

INTRO = fixtures.intro()
S0 = StrategyProfile.symmetric(3, F(0))
S1 = StrategyProfile.symmetric(3, F(1))


def test_intro_outcomes():
    assert exact_outcome(INTRO, S1, F(1, 4)).p_star_win_prob == 1
    for lam in (F(1, 10), F(1, 4), F(1, 2)):
        out = exact_outcome(INTRO, S0, lam)
        assert out.p_lower_win_prob == 1 - lam**2
    # the quantity printed as 27/32 is the chance that at most one voter is informed
    lam = F(1, 4)
    assert (1 - lam) ** 3 + 3 * lam * (1 - lam) ** 2 == F(27, 32) != exact_outcome(INTRO, S0, lam).p_lower_win_prob


def test_explicit_and_spec_paths_agree():
    lam = F(2, 7)
    prof = StrategyProfile((F(1), F(1, 3), F(0), F(1, 2), F(0)))
    spec = fixtures.asym5()
    a = exact_outcome(spec, prof, lam)
    b = exact_outcome(realize_core(spec), prof, lam)
    c = exact_outcome(realize_binary(spec, lam), prof)
    assert a.vote_count_dist == b.vote_count_dist == c.vote_count_dist
    assert a.p_star_win_prob == oracle_outcome(realize_core(spec), prof, lam)[0]


@given(binary_specs(), lambdas, st.lists(st.sampled_from([F(0), F(1), F(2, 5)]), min_size=7, max_size=7))
def test_distribution_sums_to_one(spec, lam, bits):
    out = exact_outcome(spec, StrategyProfile(tuple(bits[: spec.n])), lam)
    assert sum(out.vote_count_dist.values()) == 1


@given(binary_specs(), lambdas, st.integers(0, 2**16))
def test_all_uninformed_event_bounds_p_sub_star(spec, lam, mask):
    n = spec.n
    bits = [F((mask >> i) & 1) for i in range(n)]
    if sum(1 for b in bits if b == 0) <= n // 2:
        return
    out = exact_outcome(spec, StrategyProfile(tuple(bits)), lam)
    assert out.p_lower_win_prob >= (1 - lam) ** n


@given(binary_specs(), lambdas)
def test_public_benchmark_bound(spec, lam):
    assert exact_outcome(spec, StrategyProfile.symmetric(spec.n, F(1)), lam).p_star_win_prob >= (1 - lam) ** spec.n


def test_large_frac_sigma0():
    fam = fixtures.FRAC
    wins = [1 - exact_outcome(fam.at(n), StrategyProfile.symmetric(n, F(0)), F(1, 4)).p_star_win_prob
            for n in (101, 501, 1001)]
    assert wins[0] < wins[1] < wins[2]
    assert wins[2] >= 0.99


def test_cap_on_explicit_states():
    with pytest.raises(CapExceeded):
        exact_outcome(realize_core(fixtures.frac(41)), StrategyProfile.symmetric(41, F(0)), F(1, 4))


def test_mc_is_deterministic():
    a = monte_carlo(INTRO, S0, 50_000, seed=11, lam=F(1, 4))
    b = monte_carlo(INTRO, S0, 50_000, seed=11, lam=F(1, 4))
    assert a == b
    assert monte_carlo(INTRO, S0, 50_000, seed=12, lam=F(1, 4)) != a


def test_mc_worker_count_does_not_matter():
    prof = StrategyProfile((F(1), F(0), F(1, 2), F(0), F(1)))
    one = monte_carlo(fixtures.asym5(), prof, 100_000, seed=3, lam=0.3, workers=1)
    four = monte_carlo(fixtures.asym5(), prof, 100_000, seed=3, lam=0.3, workers=4)
    assert one == four


def test_mc_requires_seed_and_trials():
    with pytest.raises(ValueError):
        monte_carlo(INTRO, S0, 0, seed=1, lam=0.25)
    with pytest.raises(ValueError):
        monte_carlo(INTRO, S0, 10, seed=None, lam=0.25)


def _within(mc, exact, k=4):
    se = math.sqrt(float(exact) * (1 - float(exact)) / mc.trials)
    return abs(mc.p_star_win_prob - float(exact)) <= k * se + 1e-12


CASES = [
    ("intro", StrategyProfile.symmetric(3, F(0)), F(1, 4)),
    ("agg5", StrategyProfile.symmetric(5, F(1, 2)), F(1, 3)),
    ("asym5", StrategyProfile((F(1), F(0), F(0), F(0), F(0))), F(1, 5)),
    ("strong5", StrategyProfile.symmetric(5, F(1, 10)), F(1, 2)),
    ("case2", StrategyProfile.symmetric(5, F(9, 10)), F(1, 10)),
    ("case3", StrategyProfile.symmetric(5, F(1)), F(3, 5)),
    ("elite7", StrategyProfile((F(1), F(1)) + (F(0),) * 5), F(1, 4)),
]


@pytest.mark.parametrize("name,prof,lam", CASES)
def test_mc_matches_exact_on_fixtures(name, prof, lam):
    spec = getattr(fixtures, name)()
    mc = monte_carlo(spec, prof, 10**6, seed=2024, lam=lam)
    exact = exact_outcome(spec, prof, lam).p_star_win_prob
    assert _within(mc, exact)
    assert mc.ci_halfwidth > 0 or exact in (0, 1)


def test_mc_on_explicit_full_problem():
    full = realize_binary(INTRO, F(1, 4))
    mc = monte_carlo(full, S0, 10**6, seed=5)
    assert _within(mc, F(1, 16))


def test_large_frac_mc():
    n = 1001
    mc = monte_carlo(fixtures.frac(n), StrategyProfile.symmetric(n, F(0)), 20_000, seed=1, lam=0.25)
    assert mc.p_lower_win_prob >= 0.99


def test_frac_bound():
    assert fixtures.FRAC.bound() == F(2, 3)
    assert fixtures.FRAC.rho() == F(1, 2)


def test_intro_lambda_sweep():
    grid = [F(k, 100) for k in range(5, 31, 5)]
    t = sweep(INTRO, "lambda", grid + [F(35, 100)], "suspicious")
    assert [r.is_equilibrium and r.pi_min_margin > 0 for r in t.rows] == [True] * 6 + [False]
    assert all(r.profile == "sigma^0" for r in t.rows)


def test_n_sweep_reports_first_n_and_bound():
    t = sweep(fixtures.FRAC, "n", [3, 5, 7, 9, 11], "suspicious", lam=F(1, 2))
    assert t.bound == F(2, 3)
    assert t.first_n == next(r.param for r in t.rows if r.is_equilibrium and r.profile == "sigma^0")


def test_low_ratio_family_elects_p_star():
    fam = FracFamily(F(2, 3), 2, 1)
    for rule in ("good", "symmetric-root"):
        t = sweep(fam, "lambda", [F(1, 1000), F(1, 100)], rule, n=9)
        for r in t.rows:
            if r.is_equilibrium:
                assert r.p_star_win > 1 - F(1, 10)
    assert classify(fam.at(9)).classification == ADVANTAGEOUS
    assert sweep(fam, "lambda", [F(1, 10)], "suspicious", n=9).rows[0].profile == "none"


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep(INTRO, "n", [3], "suspicious", lam=F(1, 4))
    with pytest.raises(ValueError):
        sweep(fixtures.FRAC, "n", [3], "suspicious")
    with pytest.raises(ValueError):
        sweep(INTRO, "mu", [3])
    with pytest.raises(ValueError):
        sweep(INTRO, "lambda", [F(1, 4)], "hopeful")
