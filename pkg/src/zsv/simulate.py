"""Election outcome distributions: exact, Monte Carlo, and parameter sweeps."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .model import (AGGREGATE, BinaryChoiceSpec, CapExceeded, EliteSpec, ExplicitProblem,
                    PopulationSpec, StrategyProfile, UNINFORMED, fixed_fraction, realize_elite_core)
from .numeric import is_exact

EXACT = "exact"
MONTE_CARLO = "monte_carlo"
CHUNK = 1 << 14


@dataclass
class OutcomeDistribution:
    p_star_win_prob: object
    vote_count_dist: dict
    method: str = EXACT
    trials: int = None
    seed: int = None
    ci_halfwidth: float = None

    @property
    def p_lower_win_prob(self):
        return 1 - self.p_star_win_prob


# ---------------------------------------------------------------- exact


def _binom_pmf(k, p):
    if p == 0:
        return [p**0] + [p * 0] * k
    if p == 1:
        return [p * 0] * k + [p**0]
    if is_exact(p):
        q = 1 - p
        return [math.comb(k, j) * p**j * q ** (k - j) for j in range(k + 1)]
    return list(stats.binom.pmf(np.arange(k + 1), k, float(p)))


def _conv(a, b):
    if len(a) == 1:
        return [a[0] * x for x in b]
    if len(b) == 1:
        return [b[0] * x for x in a]
    if not (is_exact(*a[:1]) and is_exact(*b[:1])):
        return list(np.convolve(np.asarray(a, float), np.asarray(b, float)))
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _add(a, b):
    if a is None:
        return b
    if len(a) < len(b):
        a, b = b, a
    return [x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)]


def _poisson_binomial(ps):
    dist = [1]
    for p in ps:
        new = [0] * (len(dist) + 1)
        for k, x in enumerate(dist):
            if x:
                new[k] += x * (1 - p)
                new[k + 1] += x * p
        dist = new
    return dist


def _groups(profile):
    counts = {}
    for s in profile.probs:
        counts[s] = counts.get(s, 0) + 1
    return list(counts.items())


def _binary_votes(spec, profile, lam):
    n = spec.n
    groups = _groups(profile)
    total = [0] * (n + 1)
    for w in spec.support:
        pw = spec.winner_dist[w]
        if spec.signals == AGGREGATE:
            good = spec.win_gap(w) > 0
            dist = [1]
            for s, c in groups:
                dist = _conv(dist, _binom_pmf(c, (lam if good else 0) + (1 - lam) * s))
            for k, x in enumerate(dist):
                total[k] += pw * x
            continue
        # place the w winners group by group; layer maps the number of winners
        # still to place to the vote distribution so far
        layer = {w: [pw]}
        remaining = n
        for s, c in groups:
            nxt = {}
            for r, dist in layer.items():
                for x in range(max(0, c - (remaining - r)), min(c, r) + 1):
                    h = Fraction(math.comb(r, x) * math.comb(remaining - r, c - x), math.comb(remaining, c))
                    part = _conv(_binom_pmf(x, lam + (1 - lam) * s), _binom_pmf(c - x, (1 - lam) * s))
                    nxt[r - x] = _add(nxt.get(r - x), _conv(dist, [h * y for y in part]))
            layer = nxt
            remaining -= c
        for dist in layer.values():
            for k, x in enumerate(dist):
                total[k] += x
    return total


def _explicit_votes(problem, profile, lam):
    n = problem.n
    total = [0] * (n + 1)
    core = problem.is_core()
    if core and lam is None:
        raise ValueError("a core needs lambda")
    for st in problem.states:
        ps = []
        for j, x in enumerate(st.signals):
            forced = 1 if x in problem.good else 0
            if core:
                ps.append(lam * forced + (1 - lam) * profile[j])
            else:
                ps.append(profile[j] if x == UNINFORMED else forced)
        for k, y in enumerate(_poisson_binomial(ps)):
            total[k] += st.prob * y
    return total


def exact_outcome(problem, profile, lam=None):
    """Distribution of the p* vote count and the probability that p* wins."""
    if isinstance(problem, PopulationSpec):
        raise TypeError("use equilibrium.population_outcome for populations")
    if isinstance(problem, EliteSpec):
        problem = realize_elite_core(problem)
    if isinstance(problem, BinaryChoiceSpec):
        lam = problem.lam if lam is None else lam
        votes = _binary_votes(problem, profile, lam)
    elif isinstance(problem, ExplicitProblem):
        votes = _explicit_votes(problem, profile, lam)
    else:
        raise TypeError(f"no outcome model for {type(problem).__name__}")
    tau = (problem.n - 1) // 2
    win = sum(votes[tau + 1:])
    dist = {k: v for k, v in enumerate(votes) if v}
    return OutcomeDistribution(win, dist, EXACT)


# ---------------------------------------------------------------- Monte Carlo


def _chunk_rng(seed, k):
    # counter-based generator; the chunk index is part of the key, so
    # results do not depend on how chunks are spread over workers
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(k,))))


def _sample_binary(spec, profile, lam, size, rng):
    n = spec.n
    sig = np.asarray([float(s) for s in profile.probs])
    ws = rng.choice(n + 1, size=size, p=np.asarray([float(p) for p in spec.winner_dist]))
    keys = rng.random((size, n))
    ranks = np.argsort(np.argsort(keys, axis=1), axis=1)
    winner = ranks < ws[:, None]
    informed = rng.random((size, n)) < float(lam)
    uninformed_vote = rng.random((size, n)) < sig[None, :]
    if spec.signals == AGGREGATE:
        good_w = np.asarray([spec.win_gap(w) > 0 for w in range(n + 1)])
        news = good_w[ws][:, None] & np.ones((1, n), bool)
    else:
        news = winner
    votes = np.where(informed, news, uninformed_vote)
    return votes.sum(axis=1)


def _sample_explicit(problem, profile, lam, size, rng):
    n = problem.n
    probs = np.asarray([float(s.prob) for s in problem.states])
    probs = probs / probs.sum()
    idx = rng.choice(len(problem.states), size=size, p=probs)
    sig = np.asarray([list(s.signals) for s in problem.states])[idx]
    good = np.isin(sig, list(problem.good))
    if problem.is_core():
        informed = rng.random((size, n)) < float(lam)
    else:
        informed = sig != UNINFORMED
    sigma = np.asarray([float(s) for s in profile.probs])
    uninformed_vote = rng.random((size, n)) < sigma[None, :]
    votes = np.where(informed, good, uninformed_vote)
    return votes.sum(axis=1)


def monte_carlo(problem, profile, trials, seed, lam=None, workers=1):
    """Sample states, then votes; deterministic given the seed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seed is None:
        raise ValueError("an explicit seed is required")
    if isinstance(problem, EliteSpec):
        problem = realize_elite_core(problem)
    if isinstance(problem, BinaryChoiceSpec):
        lam = problem.lam if lam is None else lam
        sampler = _sample_binary
    else:
        sampler = _sample_explicit
    n = problem.n
    tau = (n - 1) // 2
    sizes = [CHUNK] * (trials // CHUNK) + ([trials % CHUNK] if trials % CHUNK else [])

    def run(k):
        return np.bincount(sampler(problem, profile, lam, sizes[k], _chunk_rng(seed, k)), minlength=n + 1)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    counts = np.sum(parts, axis=0)
    wins = int(counts[tau + 1:].sum())
    p = wins / trials
    half = 1.96 * math.sqrt(p * (1 - p) / trials)
    dist = {k: int(c) / trials for k, c in enumerate(counts) if c}
    return OutcomeDistribution(p, dist, MONTE_CARLO, trials, seed, half)


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class FracFamily:
    """Fixed-fraction problems: ceil(q n) winners out of n, perfect news."""

    q: object
    vw: object
    vl: object

    def at(self, n):
        return fixed_fraction(self.q, self.vw, self.vl, n)

    def rho(self):
        from .correlation import rho_critical

        return rho_critical(self.q)

    def bound(self):
        """Large-election ceiling on lambda for the p_*-electing equilibrium."""
        return 1 - self.rho() * Fraction(self.vw) / Fraction(self.vl)


@dataclass
class SweepRow:
    param: object
    profile: str
    pi_min_margin: object
    is_equilibrium: bool
    p_star_win: object


@dataclass
class SweepTable:
    parameter: str
    rule: str
    rows: list = field(default_factory=list)
    bound: object = None
    first_n: object = None

    header = ("param", "profile", "pi_min_margin", "is_equilibrium", "p_star_win")


def _suspicious_profile(spec):
    from .probability import vg_vector

    vgs = vg_vector(spec)
    tau = spec.tau
    neg = [k for k in range(1, tau + 1) if vgs[k] < 0]
    if not neg:
        return None
    if vgs[tau] < 0:
        return StrategyProfile.symmetric(spec.n, Fraction(0))
    return StrategyProfile.sanguine(spec.n, tau - max(neg))


def _fast_sigma0(spec, profile):
    return (isinstance(spec, BinaryChoiceSpec) and spec.signals != AGGREGATE and spec.is_degenerate
            and profile.is_symmetric and profile.alpha == 0)


def _evaluate(spec, profile, lam):
    from .equilibrium import judge, sigma0_gap_closed_form, verify

    if _fast_sigma0(spec, profile):
        g = sigma0_gap_closed_form(spec, lam)
        eq, strict, margin = judge(profile, (g,), lam)
        win = exact_outcome(spec, profile, lam).p_star_win_prob
        return margin, eq, win
    res = verify(spec, profile, lam)
    win = exact_outcome(spec, profile, lam).p_star_win_prob
    return res.margin, res.is_equilibrium, win


def _rows_for(spec, lam, rule, param):
    from .equilibrium import LambdaTooLarge, construct_good, solve_symmetric

    if rule == "suspicious":
        prof = _suspicious_profile(spec)
        if prof is None:
            return [SweepRow(param, "none", None, False, None)]
        margin, ok, win = _evaluate(spec, prof, lam)
        return [SweepRow(param, prof.label(), margin, ok, win)]
    if rule == "good":
        try:
            prof = construct_good(spec, lam).profile
        except LambdaTooLarge:
            prof = StrategyProfile.symmetric(spec.n, Fraction(1))
        margin, ok, win = _evaluate(spec, prof, lam)
        return [SweepRow(param, prof.label(), margin, ok, win)]
    if rule == "symmetric-root":
        rows = []
        for r in solve_symmetric(spec, lam):
            if r.alpha is None or not r.result.is_equilibrium:
                continue
            win = exact_outcome(spec, r.result.profile, lam).p_star_win_prob
            rows.append(SweepRow(param, r.result.profile.label(), r.result.margin, True, win))
        return rows
    raise ValueError(f"unknown profile rule {rule!r}")


def sweep(family, parameter, grid, rule="suspicious", lam=None, n=None):
    """One or more rows per grid point: profile, margin, verdict and win probability.

    family is a BinaryChoiceSpec (its n is fixed) or a FracFamily.
    """
    table = SweepTable(parameter, rule)
    if isinstance(family, FracFamily):
        table.bound = family.bound()
    for x in grid:
        if parameter == "lambda":
            spec = family.at(n) if isinstance(family, FracFamily) else family
            point_lam = x
        elif parameter == "n":
            if not isinstance(family, FracFamily):
                raise ValueError("n sweeps need a fixed-fraction family")
            spec = family.at(int(x))
            point_lam = lam if lam is not None else None
            if point_lam is None:
                raise ValueError("n sweeps need lambda")
        else:
            raise ValueError(f"unknown sweep parameter {parameter!r}")
        rows = _rows_for(spec, point_lam, rule, x)
        table.rows.extend(rows)
        if (parameter == "n" and table.first_n is None and rule == "suspicious"
                and any(r.is_equilibrium and r.profile == "sigma^0" for r in rows)):
            table.first_n = int(x)
    return table
