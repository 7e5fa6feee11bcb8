"""Pivotal probabilities and the conditional payoff statistics built on them."""

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import (AGGREGATE, BinaryChoiceSpec, EliteSpec, ExplicitProblem, UNINFORMED,
                    extract_core)


def binom_weight(n_others, m, lam):
    """P(M = m | S_i = s0): m of the other voters informed."""
    return math.comb(n_others, m) * lam**m * (1 - lam) ** (n_others - m)


def hypergeom(g, good, total, draws):
    """P(g good items in `draws` draws without replacement from `total` with `good` good)."""
    if g < 0 or g > draws or g > good or draws - g > total - good:
        return Fraction(0)
    return Fraction(math.comb(good, g) * math.comb(total - good, draws - g), math.comb(total, draws))


# ---------------------------------------------------------------- pivotal


@dataclass(frozen=True)
class PivotalTable:
    entries: dict
    voter: int
    profile: object

    def __call__(self, g, m):
        return self.entries.get((g, m), 0)


def _in_range(n, g, m):
    tau = (n - 1) // 2
    return 0 <= g <= tau and g <= m <= tau + g and m <= n - 1


def pivotal_table(profile, voter):
    """p_i(sigma | g, m) for every (g, m), by expanding prod_j (x s_j + y (1 - s_j) + z).

    coef[a][c] tracks the x^a z^c coefficient; the y exponent is implied by
    the number of voters processed.
    """
    n = profile.n
    if not 0 <= voter < n:
        raise IndexError(f"voter {voter} out of range for n={n}")
    tau = (n - 1) // 2
    others = [p for j, p in enumerate(profile.probs) if j != voter]
    coef = [[0] * (n) for _ in range(n)]
    coef[0][0] = Fraction(1)
    for k, s in enumerate(others):
        new = [[0] * n for _ in range(n)]
        t = 1 - s
        for a in range(k + 1):
            row = coef[a]
            for c in range(k + 1 - a):
                v = row[c]
                if v == 0:
                    continue
                if s:
                    new[a + 1][c] += v * s
                if t:
                    new[a][c] += v * t
                new[a][c + 1] += v
        coef = new
    entries = {}
    for g in range(tau + 1):
        for m in range(g, min(tau + g, n - 1) + 1):
            entries[(g, m)] = coef[tau - g][m] / math.comb(n - 1, m) if coef[tau - g][m] else 0
    return PivotalTable(entries, voter, profile)


def pivotal_prob(profile, voter, g, m):
    """Probability that voter i is pivotal given g good-news and m informed others.

    Out-of-range (g, m) give 0.
    """
    n = profile.n
    if not 0 <= voter < n:
        raise IndexError(f"voter {voter} out of range for n={n}")
    if not _in_range(n, g, m):
        return 0
    return pivotal_table(profile, voter)(g, m)


def symmetric_pivotal(n, alpha, g, m):
    """Closed form of p_i when every voter uses the same alpha."""
    if not _in_range(n, g, m):
        return 0
    tau = (n - 1) // 2
    return math.comb(n - 1 - m, tau - g) * alpha ** (tau - g) * (1 - alpha) ** (tau - (m - g))


# ---------------------------------------------------------------- Z(g, m)


@dataclass(frozen=True)
class ConditionalPayoff:
    """Z-type statistic for the event (g good-news, m informed) among the others.

    prob is P(G=g | M=m, S_i=s0), conditional the payoff difference given the
    event (0 on null events), value their product. win_prob is the
    conditional winner probability when payoffs are binary.
    """

    g: int
    m: int
    prob: object
    conditional: object
    value: object
    win_prob: object = None
    b: int = None


def _finish(g, m, prob, val, win):
    if prob == 0:
        return ConditionalPayoff(g, m, prob, 0, 0, 0 if win is not None else None)
    return ConditionalPayoff(g, m, prob, val / prob, val, None if win is None else win / prob)


def _binary_entry(spec, g, m):
    n = spec.n
    no = n - 1
    prob = val = win = 0
    for w in spec.support:
        pw = spec.winner_dist[w]
        if spec.signals == AGGREGATE:
            if g != (m if spec.win_gap(w) > 0 else 0):
                continue
            prob += pw
            val += pw * spec.win_gap(w)
            win += pw * Fraction(w, n)
            continue
        if w:
            h = hypergeom(g, w - 1, no, m)
            if h:
                x = Fraction(w, n) * pw * h
                prob += x
                val += x * spec.vw
                win += x
        if n - w:
            h = hypergeom(g, w, no, m)
            if h:
                x = Fraction(n - w, n) * pw * h
                prob += x
                val -= x * spec.vl
    return _finish(g, m, prob, val, win)


class LazyTable:
    """Z entries of a binary spec computed on first use."""

    def __init__(self, spec):
        self.spec = spec
        self._memo = {}

    def __getitem__(self, key):
        cp = self._memo.get(key)
        if cp is None:
            g, m = key
            if not 0 <= g <= m <= self.spec.n - 1:
                raise KeyError(key)
            cp = self._memo[key] = _binary_entry(self.spec, g, m)
        return cp

    def get(self, key, default=None):
        try:
            return self[key]
        except KeyError:
            return default


def _binary_table(spec):
    return {(g, m): _binary_entry(spec, g, m) for m in range(spec.n) for g in range(m + 1)}


def _explicit_table(problem, voter):
    core = problem if problem.is_core() else extract_core(problem)[0]
    n = core.n
    no = n - 1
    acc = {}
    for m in range(n):
        for g in range(m + 1):
            acc[(g, m)] = [0, 0, 0]
    binary = len({v > 0 for s in core.states for v in s.payoffs}) <= 2
    for st in core.states:
        gd = sum(1 for j, x in enumerate(st.signals) if j != voter and x in core.good)
        bd = no - gd
        v = st.payoffs[voter]
        for m in range(n):
            for g in range(max(0, m - bd), min(gd, m) + 1):
                w = Fraction(math.comb(gd, g) * math.comb(bd, m - g), math.comb(no, m))
                cell = acc[(g, m)]
                pw = st.prob * w
                cell[0] += pw
                cell[1] += pw * v
                if v > 0:
                    cell[2] += pw
    out = {}
    for k, (p, val, win) in acc.items():
        out[k] = _finish(k[0], k[1], p, val, win if binary else None)
    return out


def z_table(problem, voter=0):
    """Every Z(g, m), keyed by (g, m), counts over the n-1 others."""
    if isinstance(problem, BinaryChoiceSpec):
        return _binary_table(problem)
    if isinstance(problem, ExplicitProblem):
        return _explicit_table(problem, voter)
    raise TypeError(f"no Z table for {type(problem).__name__}")


def z_value(problem, g, m, mode="good", voter=0, table=None):
    """Z(g, m) in good-news mode; Z_B(b, m) = Z(m - b, m) in bad-news mode."""
    table = table or z_table(problem, voter)
    if mode == "bad":
        b = g
        cp = table.get((m - b, m))
        if cp is None:
            return ConditionalPayoff(m - b, m, 0, 0, 0, None, b)
        return ConditionalPayoff(cp.g, cp.m, cp.prob, cp.conditional, cp.value, cp.win_prob, b)
    if mode != "good":
        raise ValueError(f"unknown mode {mode!r}")
    cp = table.get((g, m))
    if cp is None:
        return ConditionalPayoff(g, m, 0, 0, 0)
    return cp


# ---------------------------------------------------------------- V^G


def vg_closed_form(spec, kappa):
    """Perfect-news V^G(kappa) from the binom(w, kappa)-weighted posterior."""
    n = spec.n
    num = 0
    den = 0
    for w in spec.support:
        weight = math.comb(w, kappa) * spec.winner_dist[w]
        if not weight:
            continue
        num += (Fraction(w - kappa, n - kappa) * spec.vw - Fraction(n - w, n - kappa) * spec.vl) * weight
        den += weight
    return num / den if den else 0


def vg(problem, kappa, table=None):
    """Payoff difference of an uninformed voter when exactly kappa others got
    good news and nobody got bad news."""
    tau = problem.tau
    if not 0 <= kappa <= tau:
        raise ValueError(f"kappa must lie in 0..{tau}")
    if isinstance(problem, BinaryChoiceSpec) and problem.signals != AGGREGATE:
        return vg_closed_form(problem, kappa)
    table = table or z_table(problem)
    return table[(kappa, kappa)].conditional


def vg_vector(problem):
    if isinstance(problem, BinaryChoiceSpec) and problem.signals != AGGREGATE:
        return [vg_closed_form(problem, k) for k in range(problem.tau + 1)]
    table = z_table(problem)
    return [table[(k, k)].conditional for k in range(problem.tau + 1)]


def vn_kernel(n, q, payoffs, g, b):
    """Payoff difference with ceil(q n) winners after g winner and b loser reports."""
    vw, vl = payoffs
    w = math.ceil(Fraction(q) * n) if not isinstance(q, float) else math.ceil(q * n)
    rest = n - g - b
    if rest <= 0:
        raise ZeroDivisionError("no unreported voters left")
    return Fraction(w - g, rest) * vw - Fraction(n - w - b, rest) * vl


# ---------------------------------------------------------------- elites


def elite_z_table(spec, elite):
    """Group-resolved Z for an elite (elite=True) or non-elite voter.

    Keys are (gE, gN, mE, mN): good news and informed counts among other
    elites and other non-elites.
    """
    if not isinstance(spec, EliteSpec):
        raise TypeError("elite_z_table needs an EliteSpec")
    base, e, n = spec.base, spec.elites, spec.n
    eo = e - 1 if elite else e
    no = n - e if elite else n - e - 1
    size = e if elite else n - e
    acc = {}
    for w in base.support:
        pw = base.winner_dist[w]
        we, wn = spec.split(w)
        mine = we if elite else wn
        cases = []
        if mine:
            k_e, k_n = (we - 1, wn) if elite else (we, wn - 1)
            cases.append((Fraction(mine, size) * pw, k_e, k_n, base.vw, True))
        if size - mine:
            cases.append((Fraction(size - mine, size) * pw, we, wn, -base.vl, False))
        for p, k_e, k_n, v, win in cases:
            for me in range(eo + 1):
                for ge in range(me + 1):
                    he = hypergeom(ge, k_e, eo, me)
                    if not he:
                        continue
                    for mn in range(no + 1):
                        for gn in range(mn + 1):
                            hn = hypergeom(gn, k_n, no, mn)
                            if not hn:
                                continue
                            cell = acc.setdefault((ge, gn, me, mn), [0, 0, 0])
                            x = p * he * hn
                            cell[0] += x
                            cell[1] += x * v
                            if win:
                                cell[2] += x
    return {k: v for k, v in acc.items()}


def elite_conditional(spec, elite, ge, gn, me, mn, table=None):
    table = table or elite_z_table(spec, elite)
    cell = table.get((ge, gn, me, mn))
    if not cell or cell[0] == 0:
        return 0
    return cell[1] / cell[0]
