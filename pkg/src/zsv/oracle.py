"""Brute-force ground truth over explicit state spaces.

Everything here is computed straight from the definitions: states are
diluted by enumerating who stays informed, action profiles are enumerated
voter by voter, and conditional expectations are ratios of summed state
mass. Nothing is imported from the fast-path modules.

Exact sums run on gmpy2 rationals for speed and come back as Fractions.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .model import ExplicitProblem, StrategyProfile, UNINFORMED

MAX_N = 7


class OracleSizeError(ValueError):
    pass


def _guard(n, limit=MAX_N):
    if n > limit:
        raise OracleSizeError(f"oracle enumeration limited to n <= {limit}, got {n}")


_CACHE = {}
_MPQ = type(mpq(0))


def _q(x):
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return mpq(x.numerator, x.denominator)
    return x


def _back(x):
    if isinstance(x, _MPQ):
        return Fraction(int(x.numerator), int(x.denominator))
    return x


def full_states(problem, lam=None):
    """(payoffs, signals, prob) for the full problem.

    A core (every voter informed) is diluted here by listing, for each state,
    every subset of voters that keeps its signal.
    """
    key = (id(problem), lam)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is problem:
        return hit[1]
    if not problem.is_core():
        out = [(tuple(_q(v) for v in s.payoffs), s.signals, _q(s.prob)) for s in problem.states]
        _CACHE[key] = (problem, out)
        return out
    if lam is None:
        raise ValueError("a core needs lambda")
    lam = _q(lam)
    n = problem.n
    out = []
    for st in problem.states:
        payoffs = tuple(_q(v) for v in st.payoffs)
        for keep in itertools.product((True, False), repeat=n):
            p = _q(st.prob)
            sig = []
            for x, k in zip(st.signals, keep):
                if k:
                    p = p * lam
                    sig.append(x)
                else:
                    p = p * (1 - lam)
                    sig.append(UNINFORMED)
            out.append((payoffs, tuple(sig), p))
    if len(_CACHE) > 64:
        _CACHE.clear()
    _CACHE[key] = (problem, out)
    return out


def _action_options(signal, sigma, good, bad):
    # (action, probability) pairs with nonzero probability; 1 means "vote p*"
    if signal in good:
        return ((1, 1),)
    if signal in bad:
        return ((0, 1),)
    sigma = _q(sigma)
    out = []
    if sigma != 0:
        out.append((1, sigma))
    if sigma != 1:
        out.append((0, 1 - sigma))
    return tuple(out)


def _vote_count_dist(signals, profile, good, bad, skip=None):
    """Distribution of the number of p* votes, enumerating action profiles."""
    options = [
        _action_options(x, profile[j], good, bad)
        for j, x in enumerate(signals)
        if j != skip
    ]
    dist = {}
    for combo in itertools.product(*options):
        p = 1
        votes = 0
        for a, q in combo:
            p = p * q
            votes += a
        dist[votes] = dist.get(votes, 0) + p
    return dist


def brute_force_gap(problem, profile, voter, lam=None):
    """Payoff gain from voting p* rather than p_* for an uninformed voter,
    summed over states and the other voters' action profiles."""
    n = problem.n
    _guard(n)
    tau = (n - 1) // 2
    states = full_states(problem, lam)
    by_signal = {}
    total = 0
    for payoffs, signals, p in states:
        if signals[voter] != UNINFORMED:
            continue
        total += p
        by_signal[signals] = by_signal.get(signals, 0) + p * payoffs[voter]
    if total == 0:
        raise ValueError("voter is never uninformed")
    acc = 0
    for signals, mass in by_signal.items():
        if mass == 0:
            continue
        dist = _vote_count_dist(signals, profile, problem.good, problem.bad, skip=voter)
        acc += mass * dist.get(tau, 0)
    return _back(acc / total)


def oracle_outcome(problem, profile, lam=None):
    """(P(p* wins), vote-count distribution) by enumerating states and actions."""
    n = problem.n
    _guard(n)
    tau = (n - 1) // 2
    by_signal = {}
    for payoffs, signals, p in full_states(problem, lam):
        by_signal[signals] = by_signal.get(signals, 0) + p
    votes = {}
    for signals, mass in by_signal.items():
        if mass == 0:
            continue
        for k, q in _vote_count_dist(signals, profile, problem.good, problem.bad).items():
            votes[k] = votes.get(k, 0) + mass * q
    win = sum(q for k, q in votes.items() if k >= tau + 1)
    return _back(win), {k: _back(q) for k, q in sorted(votes.items())}


def oracle_pivotal(profile, voter, g, m):
    """P(voter is pivotal | g good-news and m informed others), by averaging
    over every possible informed set and enumerating the rest's actions."""
    n = profile.n
    _guard(n, 9)
    tau = (n - 1) // 2
    others = [j for j in range(n) if j != voter]
    if not (0 <= g <= m <= n - 1):
        return 0
    sets = list(itertools.combinations(others, m))
    acc = 0
    for informed in sets:
        rest = [j for j in others if j not in informed]
        options = [((1, _q(profile[j])), (0, 1 - _q(profile[j]))) for j in rest]
        for combo in itertools.product(*options):
            if g + sum(a for a, _ in combo) != tau:
                continue
            p = 1
            for _, q in combo:
                p = p * q
            acc += p
    return _back(acc / len(sets)) if isinstance(acc, _MPQ) else acc / len(sets)


def _condition(problem, lam, voter, keep):
    num = 0
    den = 0
    for payoffs, signals, p in full_states(problem, lam):
        if signals[voter] != UNINFORMED:
            continue
        others = [x for j, x in enumerate(signals) if j != voter]
        m = sum(1 for x in others if x != UNINFORMED)
        g = sum(1 for x in others if x in problem.good)
        b = sum(1 for x in others if x in problem.bad)
        flag = keep(g, b, m)
        if flag is None:
            continue
        den += p
        if flag:
            num += p * payoffs[voter]
    return num, den


def oracle_z(problem, g, m, voter=0, lam=Fraction(1, 2)):
    """E[v_i 1{G=g} | M=m, S_i=s0] as a ratio of state sums."""
    _guard(problem.n)
    num, den = _condition(problem, lam, voter, lambda gg, b, mm: (gg == g) if mm == m else None)
    return _back(num / den) if den else 0


def oracle_event_prob(problem, g, m, voter=0, lam=Fraction(1, 2)):
    _guard(problem.n)
    hits = 0
    den = 0
    for payoffs, signals, p in full_states(problem, lam):
        if signals[voter] != UNINFORMED:
            continue
        others = [x for j, x in enumerate(signals) if j != voter]
        if sum(1 for x in others if x != UNINFORMED) != m:
            continue
        den += p
        if sum(1 for x in others if x in problem.good) == g:
            hits += p
    return _back(hits / den) if den else 0


def oracle_vg(problem, kappa, voter=0, lam=Fraction(1, 2)):
    """E[v_i | exactly kappa good-news others, no bad news, S_i=s0]."""
    _guard(problem.n)
    num, den = _condition(problem, lam, voter,
                          lambda g, b, m: True if (g == kappa and b == 0) else None)
    return _back(num / den) if den else 0


def oracle_conditional(problem, voter, lam, predicate):
    """E[v_i | S_i=s0 and predicate(signals)] for an arbitrary event."""
    num = 0
    den = 0
    for payoffs, signals, p in full_states(problem, lam):
        if signals[voter] != UNINFORMED or not predicate(signals):
            continue
        num += p * payoffs[voter]
        den += p
    return _back(num / den) if den else 0


@dataclass
class PureEquilibrium:
    profile: StrategyProfile
    gaps: tuple
    is_equilibrium: bool
    is_strict: bool
    p_star_win: object


def enumerate_pure_equilibria(problem, lam=None, include_all=False):
    """Check all 2^n pure uninformed-vote assignments by brute force."""
    n = problem.n
    _guard(n)
    out = []
    for bits in itertools.product((Fraction(0), Fraction(1)), repeat=n):
        prof = StrategyProfile(bits)
        gaps = tuple(brute_force_gap(problem, prof, i, lam) for i in range(n))
        eq = all((g >= 0) if s == 1 else (g <= 0) for g, s in zip(gaps, bits))
        strict = all((g > 0) if s == 1 else (g < 0) for g, s in zip(gaps, bits))
        if eq or include_all:
            win, _ = oracle_outcome(problem, prof, lam)
            out.append(PureEquilibrium(prof, gaps, eq, strict, win))
    return out


# ---------------------------------------------------------------- cross checks


@dataclass
class OracleReport:
    quantity: str
    definitional_value: object
    fast_path_value: object
    match: bool


def _fast(name):
    # resolved lazily so the oracle module itself stays independent
    from . import equilibrium, probability, simulate

    return {
        "z": lambda p, g, m, voter=0, **_: probability.z_value(p, g, m, voter=voter).value,
        "vg": lambda p, kappa, **_: probability.vg(p, kappa),
        "pivotal": lambda profile, voter, g, m, **_: probability.pivotal_prob(profile, voter, g, m),
        "outcome": lambda p, profile, lam, **_: simulate.exact_outcome(p, profile, lam).p_star_win_prob,
        "gap": lambda p, profile, voter, lam, **_: equilibrium.payoff_gap(p, profile, voter, lam),
    }[name]


def _substrate(p, lam):
    # explicit problems are used as given; specs go through their realization
    from .model import BinaryChoiceSpec, EliteSpec, realize_core, realize_elite_core

    if isinstance(p, BinaryChoiceSpec):
        return realize_core(p)
    if isinstance(p, EliteSpec):
        return realize_elite_core(p)
    return p


def cross_check(quantity, **inputs):
    """Compute a quantity both ways and compare exactly."""
    if quantity not in ("z", "vg", "pivotal", "outcome", "gap"):
        raise KeyError(f"unknown quantity {quantity!r}")
    fast = _fast(quantity)(**{k: v for k, v in inputs.items()})
    lam = inputs.get("lam")
    if quantity == "pivotal":
        ref = oracle_pivotal(inputs["profile"], inputs["voter"], inputs["g"], inputs["m"])
    else:
        sub = _substrate(inputs["p"], lam)
        if quantity == "z":
            ref = oracle_z(sub, inputs["g"], inputs["m"], inputs.get("voter", 0))
        elif quantity == "vg":
            ref = oracle_vg(sub, inputs["kappa"])
        elif quantity == "outcome":
            ref = oracle_outcome(sub, inputs["profile"], lam)[0]
        else:
            ref = brute_force_gap(sub, inputs["profile"], inputs["voter"], lam)
    return OracleReport(quantity, ref, fast, ref == fast)
