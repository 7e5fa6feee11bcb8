"""Payoff gaps, equilibrium checks, the constructive equilibria and lambda thresholds."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import poly
from .model import (BinaryChoiceSpec, EliteSpec, ExplicitProblem, PopulationSpec, SpecError,
                    StrategyProfile)
from .numeric import FLOAT_TOL, is_exact
from .probability import (LazyTable, binom_weight, elite_z_table, pivotal_table, symmetric_pivotal,
                          vg_vector, z_table)

__all__ = [
    "StrategyProfile", "EquilibriumResult", "payoff_gap", "verify", "lambda_threshold",
    "construct_suspicious", "solve_symmetric", "construct_good", "population_gap",
    "population_solve_symmetric", "population_outcome", "elite_gap", "elite_equilibrium",
    "pivotal_conditional", "NotAdverse", "LambdaTooLarge",
]


class NotAdverse(ValueError):
    pass


class LambdaTooLarge(ValueError):
    def __init__(self, msg, max_lambda):
        super().__init__(msg)
        self.max_lambda = max_lambda


@lru_cache(maxsize=128)
def _table(problem, voter):
    if isinstance(problem, BinaryChoiceSpec):
        return LazyTable(problem)
    return z_table(problem, voter)


def _zt(problem, voter):
    # exchangeable problems share one table across voters
    if isinstance(problem, ExplicitProblem) and problem.groups is not None:
        return _table(problem, voter)
    return _table(problem, 0)


def _pivots(profile, voter):
    if profile.is_symmetric:
        n, a = profile.n, profile.probs[0]
        tau = (n - 1) // 2
        one = a**0
        if a == 0:
            return {(tau, m): one for m in range(tau, n)}
        if a == 1:
            return {(g, g + tau): one for g in range(tau + 1)}
        return {(g, m): symmetric_pivotal(n, a, g, m)
                for g in range(tau + 1) for m in range(g, min(tau + g, n - 1) + 1)}
    return pivotal_table(profile, voter).entries


def _check_exchangeable(problem):
    # pivot weights by news counts alone are only right when voters are interchangeable
    if isinstance(problem, ExplicitProblem) and problem.groups is not None:
        raise SpecError("grouped problems need elite_gap or the oracle")


def _gap_terms(problem, profile, voter):
    """Pairs (coefficient, m) with gap = sum coef * lam^m (1-lam)^(N-m), N = n-1."""
    if isinstance(problem, EliteSpec):
        return _elite_terms(problem, profile, voter)
    _check_exchangeable(problem)
    n = problem.n
    if profile.n != n:
        raise SpecError("profile size does not match the problem")
    table = _zt(problem, voter)
    terms = {}
    for (g, m), p in _pivots(profile, voter).items():
        if not p:
            continue
        z = table[(g, m)].value
        if z:
            terms[m] = terms.get(m, 0) + p * math.comb(n - 1, m) * z
    return sorted(terms.items(), key=lambda kv: kv[0])


def _eval_terms(terms, n_others, lam):
    acc = 0
    for m, c in terms:
        acc += c * lam**m * (1 - lam) ** (n_others - m)
    return acc


def _terms_poly(terms, n_others):
    out = []
    one_minus = [1, -1]
    for m, c in terms:
        out = poly.add(out, poly.scale(poly.mul([0] * m + [1], poly.power(one_minus, n_others - m)), c))
    return out


def payoff_gap(problem, profile, voter, lam):
    """Expected gain for an uninformed voter from voting p* instead of p_*."""
    if isinstance(problem, EliteSpec):
        return elite_gap(problem, profile, voter, lam)
    if not 0 <= voter < problem.n:
        raise IndexError("voter out of range")
    _check_exchangeable(problem)
    n = problem.n
    table = _zt(problem, voter)
    acc = 0
    for (g, m), p in _pivots(profile, voter).items():
        if not p:
            continue
        z = table[(g, m)].value
        if z:
            acc += p * binom_weight(n - 1, m, lam) * z
    return acc


@dataclass(frozen=True)
class PivotalBelief:
    prob: object
    payoff: object
    win_prob: object


def pivotal_conditional(problem, profile, voter, lam):
    """Probability of being pivotal, and the payoff difference and winner
    probability conditional on it."""
    n = problem.n
    table = _zt(problem, voter)
    piv = 0
    val = 0
    win = 0
    for (g, m), p in _pivots(profile, voter).items():
        if not p:
            continue
        cp = table[(g, m)]
        if not cp.prob:
            continue
        w = p * binom_weight(n - 1, m, lam)
        piv += w * cp.prob
        val += w * cp.value
        if cp.win_prob is not None:
            win += w * cp.prob * cp.win_prob
    if piv == 0:
        return PivotalBelief(0, 0, None)
    return PivotalBelief(piv, val / piv, win / piv)


# ---------------------------------------------------------------- verification


@dataclass
class EquilibriumResult:
    profile: StrategyProfile
    gaps: tuple
    is_equilibrium: bool
    is_strict: bool
    margin: object
    lam: object
    certified: bool = False
    note: str = ""

    def rows(self):
        return [(i, self.profile[i], g) for i, g in enumerate(self.gaps)]


def _voter_classes(problem, profile):
    # voters that see the same multiset of others' strategies share a gap
    n = problem.n
    groups = None
    if isinstance(problem, EliteSpec):
        groups = [problem.is_elite(i) for i in range(n)]
    elif isinstance(problem, ExplicitProblem) and problem.groups is not None:
        groups = [next(k for k, g in enumerate(problem.groups) if i in g) for i in range(n)]
    reps = {}
    for i in range(n):
        key = (profile[i], None if groups is None else groups[i])
        reps.setdefault(key, i)
    return reps, groups


def _all_gaps(problem, profile, lam):
    reps, groups = _voter_classes(problem, profile)
    cache = {key: payoff_gap(problem, profile, i, lam) for key, i in reps.items()}
    return tuple(cache[(profile[i], None if groups is None else groups[i])] for i in range(problem.n))


def judge(profile, gaps, lam, tol=None):
    exact = tol is None and all(is_exact(g) for g in gaps) and all(is_exact(p) for p in profile.probs)
    if tol is None and not exact:
        tol = FLOAT_TOL

    def zero(x):
        return x == 0 if exact else abs(x) <= tol

    eq = True
    strict = True
    slack = []
    for s, g in zip(profile.probs, gaps):
        if s == 1:
            ok = g >= 0 or zero(g)
            slack.append(g)
            strict &= g > 0 and not zero(g)
        elif s == 0:
            ok = g <= 0 or zero(g)
            slack.append(-g)
            strict &= g < 0 and not zero(g)
        else:
            ok = zero(g)
            slack.append(-abs(g))
            strict = False
        eq &= ok
    return eq, eq and strict, min(slack)


def verify(problem, profile, lam, tol=None):
    """Equilibrium check over all voters in weakly undominated strategies."""
    gaps = _all_gaps(problem, profile, lam)
    eq, strict, margin = judge(profile, gaps, lam, tol)
    return EquilibriumResult(profile, gaps, eq, strict, margin, lam)


# ---------------------------------------------------------------- thresholds


@dataclass
class ThresholdResult:
    value: object
    exact: bool
    monotone: bool = True
    note: str = ""


def _first_positive_stretch(f, hi=1):
    """Largest t in (0, hi] with f > 0 on all of (0, t); exact for rational f."""
    f = poly.trim(f)
    if not f:
        return Fraction(0), True
    roots = poly.isolate_roots(f, 0, hi)
    first_gap = poly.gap_points(f, 0, hi)
    if not first_gap or poly.evaluate(f, first_gap[0]) <= 0:
        return Fraction(0), True
    if not roots:
        return Fraction(hi), True
    lo, up = poly.refine(f, roots[0], Fraction(1, 10**13))
    r = poly.rational_root_near(f, (lo, up))
    if r is not None:
        return r, True
    return (lo + up) / 2, False


def _class_gap_polys(problem, profile):
    reps, _ = _voter_classes(problem, profile)
    out = []
    for (s, _g), i in reps.items():
        terms = _gap_terms(problem, profile, i)
        p = _terms_poly(terms, problem.n - 1)
        out.append((s, p))
    return out


def _grid_strict(problem, profile, grid):
    return [verify(problem, profile, x).is_strict for x in grid]


def lambda_threshold(problem, profile, grid_points=64):
    """Supremum of lambda below which the pure profile is a strict equilibrium."""
    if not profile.is_pure:
        raise SpecError("lambda_threshold needs a pure profile")
    closed = _closed_form_threshold(problem, profile)
    exact_inputs = _exact_problem(problem) and closed is None and problem.n <= 15
    grid = [Fraction(k, grid_points + 1) for k in range(1, grid_points + 1)]
    if closed is not None:
        value, exact = closed
    elif exact_inputs:
        value, exact = Fraction(1), True
        for s, p in _class_gap_polys(problem, profile):
            f = p if s == 1 else poly.scale(p, -1)
            t, ex = _first_positive_stretch(f)
            if t < value:
                value, exact = t, ex
    else:
        fgrid = [float(x) for x in grid]
        flags = _grid_strict(problem, profile, fgrid)
        if not flags[0]:
            lo, hi = 0.0, fgrid[0]
        elif all(flags):
            lo, hi = fgrid[-1], 1.0
        else:
            k = flags.index(False)
            lo, hi = fgrid[k - 1], fgrid[k]
        while hi - lo > 1e-9:
            mid = (lo + hi) / 2
            if verify(problem, profile, mid).is_strict:
                lo = mid
            else:
                hi = mid
        value, exact = (hi if hi < 1.0 else 1.0), False
        if value < 1e-9:
            value = 0.0
    # look for strictness returning above the threshold
    monotone = True
    if problem.n <= 41 or closed is None:
        sample = [x for x in grid if x > value]
        if sample and any(_grid_strict(problem, profile, sample if exact_inputs else [float(x) for x in sample])):
            monotone = False
    note = "" if value > 0 else "profile is not a strict equilibrium near lambda = 0"
    if not monotone:
        note = (note + "; " if note else "") + "strictness returns above the threshold"
    return ThresholdResult(value, exact, monotone, note)


def _exact_problem(problem):
    if isinstance(problem, BinaryChoiceSpec):
        return problem.exact
    if isinstance(problem, EliteSpec):
        return problem.base.exact
    if isinstance(problem, ExplicitProblem):
        return all(is_exact(s.prob, *s.payoffs) for s in problem.states)
    return False


def sigma0_gap_closed_form(spec, lam):
    """Gap under sigma^0 with a fixed winner count w and perfect news.

    Only informed winners vote p*, so pivotality means exactly tau informed
    winners among the others; summing over informed losers leaves
    (1/n) C(w,tau) lam^tau (1-lam)^(w-tau-1) [(w-tau) vw - (n-w)(1-lam) vl].
    """
    n, tau = spec.n, spec.tau
    (w,) = spec.support
    if w <= tau:
        return 0
    return (Fraction(math.comb(w, tau), n) * lam**tau * (1 - lam) ** (w - tau - 1)
            * ((w - tau) * spec.vw - (n - w) * (1 - lam) * spec.vl))


def sigma0_threshold(spec):
    """lambda below which sigma^0 is strict for a fixed winner count."""
    n, tau = spec.n, spec.tau
    (w,) = spec.support
    if w <= tau:
        return Fraction(0)
    t = 1 - Fraction(w - tau, n - w) * spec.vw / spec.vl if w < n else 0
    return max(t, 0)


def _closed_form_threshold(problem, profile):
    if (isinstance(problem, BinaryChoiceSpec) and problem.signals != "aggregate"
            and problem.is_degenerate and profile.is_symmetric and profile.alpha == 0
            and problem.n > 9):
        t = sigma0_threshold(problem)
        return (t, is_exact(t))
    return None


# ---------------------------------------------------------------- constructions


@dataclass
class SuspiciousResult:
    profile: StrategyProfile
    lambda_bar: ThresholdResult
    kappa_star: int
    vg_values: list


def construct_suspicious(problem):
    """Asymmetric strict equilibrium electing p_* when information is scarce."""
    vgs = vg_vector(problem)
    tau = problem.tau
    negative = [k for k in range(1, tau + 1) if vgs[k] < 0]
    if not negative:
        raise NotAdverse("problem is not adversely correlated")
    ks = max(negative)
    t = 0 if vgs[tau] < 0 else tau - ks
    prof = StrategyProfile.sanguine(problem.n, t)
    return SuspiciousResult(prof, lambda_threshold(problem, prof), ks, vgs)


def symmetric_gap_poly(problem, lam):
    """Gap under sigma^alpha as a polynomial in alpha (constant term first)."""
    n = problem.n
    tau = problem.tau
    table = _zt(problem, 0)
    out = []
    for g in range(tau + 1):
        for m in range(g, min(tau + g, n - 1) + 1):
            z = table[(g, m)].value
            if not z:
                continue
            c = math.comb(n - 1 - m, tau - g) * binom_weight(n - 1, m, lam) * z
            term = poly.mul([0] * (tau - g) + [1], poly.power([1, -1], tau + g - m))
            out = poly.add(out, poly.scale(term, c))
    return out


@dataclass
class SymmetricRoot:
    alpha: object
    bracket: tuple
    exact: bool
    kind: str
    result: EquilibriumResult = None


@dataclass
class SymmetricSolution:
    roots: list = field(default_factory=list)
    degenerate: bool = False

    def alphas(self):
        return [r.alpha for r in self.roots]

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _solve_poly(f, lam, mk_result, exact):
    sol = SymmetricSolution()
    if not poly.trim(f) or (not exact and all(abs(c) == 0 for c in f)):
        sol.degenerate = True
        sol.roots.append(SymmetricRoot(None, (0, 1), exact, "all"))
        return sol
    p0 = poly.evaluate(f, 0)
    p1 = poly.evaluate(f, 1)
    if p0 <= 0:
        sol.roots.append(SymmetricRoot(Fraction(0) if exact else 0.0, (0, 0), True, "boundary"))
    if exact:
        for lo, hi in poly.isolate_roots(f, 0, 1):
            lo, hi = poly.refine(f, (lo, hi), Fraction(1, 10**12))
            r = poly.rational_root_near(f, (lo, hi))
            if r is not None:
                sol.roots.append(SymmetricRoot(r, (r, r), True, "interior"))
                continue
            sol.roots.append(SymmetricRoot((lo + hi) / 2, (lo, hi), False, "interior"))
    else:
        for lo, hi in _float_roots(lambda a: poly.evaluate(f, a)):
            sol.roots.append(SymmetricRoot((lo + hi) / 2, (lo, hi), False, "interior"))
    if p1 >= 0:
        sol.roots.append(SymmetricRoot(Fraction(1) if exact else 1.0, (1, 1), True, "boundary"))
    for r in sol.roots:
        r.result = mk_result(r)
    return sol


def _float_roots(fn, points=4096):
    xs = [k / points for k in range(1, points)]
    vals = [fn(x) for x in xs]
    out = []
    for (a, fa), (b, fb) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
        if fa == 0:
            out.append((a, a))
        elif fa * fb < 0:
            while b - a > 1e-12:
                mid = (a + b) / 2
                fm = fn(mid)
                if fm == 0:
                    a = b = mid
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    b = mid
            out.append((a, b))
    return out


def _root_result(problem_gap, n, lam, root):
    """Result for a symmetric root: the bracket endpoints certify a sign change."""
    a = root.alpha
    prof = StrategyProfile.symmetric(n, a)
    g = problem_gap(a)
    if root.kind == "boundary" or root.exact:
        eq, strict, margin = judge(prof, (g,) * n, lam)
        return EquilibriumResult(prof, (g,) * n, eq, strict, margin, lam, certified=eq)
    lo, hi = root.bracket
    glo, ghi = problem_gap(lo), problem_gap(hi)
    certified = glo == 0 or ghi == 0 or (glo > 0) != (ghi > 0)
    return EquilibriumResult(prof, (g,) * n, certified, False, -abs(g), lam, certified=certified,
                             note="mixed root bracketed to width %.1e" % float(hi - lo))


def solve_symmetric(problem, lam):
    """All alpha in [0, 1] making sigma^alpha an equilibrium."""
    n = problem.n
    exact = _exact_problem(problem) and is_exact(lam)
    f = symmetric_gap_poly(problem, lam)

    def gap(a):
        return payoff_gap(problem, StrategyProfile.symmetric(n, a), 0, lam)

    return _solve_poly(f, lam, lambda r: _root_result(gap, n, lam, r), exact)


@dataclass
class GoodResult:
    profile: StrategyProfile
    case: int
    lam: object
    result: EquilibriumResult
    alpha_bar: object = None
    win_bound: object = None


def construct_good(problem, lam, eps=Fraction(1, 20)):
    """Equilibrium in which p* wins with high probability when information is scarce."""
    n, tau = problem.n, problem.tau
    zb = _zt(problem, 0)[(0, tau)].value  # Z_B(tau, tau)
    if zb >= 0:
        prof = StrategyProfile.symmetric(n, Fraction(1) if is_exact(lam) else 1.0)
        res = verify(problem, prof, lam)
        if not res.is_equilibrium:
            t = lambda_threshold(problem, StrategyProfile.sanguine(n, n)).value
            raise LambdaTooLarge(f"sigma^1 is not an equilibrium at lambda={lam}", t)
        return GoodResult(prof, 1 if zb > 0 else 3, lam, res, None, (1 - lam) ** n)
    abar = (1 - float(eps)) ** (1.0 / (2 * n))
    root = _good_root(problem, lam, abar, eps)
    if root is None:
        # shrink lambda geometrically until the construction goes through
        trial = lam
        found = None
        for _ in range(60):
            trial = trial / 2
            if _good_root(problem, trial, abar, eps) is not None:
                found = trial
                break
        raise LambdaTooLarge(f"no equilibrium alpha in ({abar:.6g}, 1) at lambda={lam}", found)
    prof = root.result.profile
    return GoodResult(prof, 2, lam, root.result, abar, (1 - lam) ** n * root.alpha**n)


def _good_root(problem, lam, abar, eps):
    sol = solve_symmetric(problem, lam)
    inner = [r for r in sol.roots if r.kind == "interior" and r.result.is_equilibrium]
    if not inner:
        return None
    best = max(inner, key=lambda r: r.alpha)
    if best.alpha > abar:
        return best
    # below the sufficient bound the win probability is checked directly
    from .simulate import exact_outcome

    win = exact_outcome(problem, best.result.profile, lam).p_star_win_prob
    return best if win >= 1 - eps else None


# ---------------------------------------------------------------- populations


def population_gap(pop, alpha, lam):
    """Gap of a drawn voter under sigma^alpha, averaging over electorate sizes
    with the size-biased posterior."""
    acc = None
    for n, w in pop.size_biased().items():
        x = w * payoff_gap(pop.spec_at(n), StrategyProfile.symmetric(n, alpha), 0, lam)
        acc = x if acc is None else acc + x
    return acc


def population_gap_poly(pop, lam):
    out = []
    for n, w in pop.size_biased().items():
        out = poly.add(out, poly.scale(symmetric_gap_poly(pop.spec_at(n), lam), w))
    return out


def population_solve_symmetric(pop, lam):
    exact = all(_exact_problem(s) for s in pop.specs) and is_exact(lam) and is_exact(*pop.probs)
    f = population_gap_poly(pop, lam)
    n0 = pop.n0

    def gap(a):
        return population_gap(pop, a, lam)

    return _solve_poly(f, lam, lambda r: _root_result(gap, n0, lam, r), exact)


def population_outcome(pop, alpha, lam):
    from .simulate import exact_outcome

    acc = 0
    for n, q in zip(pop.support, pop.probs):
        if q:
            acc += q * exact_outcome(pop.spec_at(n), StrategyProfile.symmetric(n, alpha), lam).p_star_win_prob
    return acc


# ---------------------------------------------------------------- elites


def _group_pivot(probs):
    """P(a of the group's uninformed vote p* | c of them informed)."""
    size = len(probs)
    coef = [[0] * (size + 1) for _ in range(size + 1)]
    coef[0][0] = Fraction(1)
    for k, s in enumerate(probs):
        new = [[0] * (size + 1) for _ in range(size + 1)]
        for a in range(k + 1):
            for c in range(k + 1 - a):
                v = coef[a][c]
                if not v:
                    continue
                if s:
                    new[a + 1][c] += v * s
                if 1 - s:
                    new[a][c] += v * (1 - s)
                new[a][c + 1] += v
        coef = new
    return {(a, c): coef[a][c] / math.comb(size, c)
            for a in range(size + 1) for c in range(size + 1 - a) if coef[a][c]}


@lru_cache(maxsize=64)
def _elite_table(spec, elite):
    return elite_z_table(spec, elite)


def _elite_terms(spec, profile, voter):
    n, e, tau = spec.n, spec.elites, spec.tau
    if profile.n != n:
        raise SpecError("profile size does not match the problem")
    elite = spec.is_elite(voter)
    table = _elite_table(spec, elite)
    pe = _group_pivot([profile[j] for j in range(e) if j != voter])
    pn = _group_pivot([profile[j] for j in range(e, n) if j != voter])
    eo = e - 1 if elite else e
    no = n - 1 - eo
    terms = {}
    for (ge, gn, me, mn), (prob, val, _win) in table.items():
        if not val:
            continue
        need = tau - ge - gn
        if need < 0:
            continue
        piv = 0
        for ae in range(0, min(need, eo - me) + 1):
            x = pe.get((ae, me))
            y = pn.get((need - ae, mn))
            if x and y:
                piv += x * y
        if piv:
            m = me + mn
            terms[m] = terms.get(m, 0) + math.comb(eo, me) * math.comb(no, mn) * piv * val
    return sorted(terms.items())


def elite_gap(spec, profile, voter, lam):
    """Gap of one voter in the elite problem, over group-resolved news counts."""
    if not 0 <= voter < spec.n:
        raise IndexError("voter out of range")
    return _eval_terms(_elite_terms(spec, profile, voter), spec.n - 1, lam)


@dataclass
class EliteEquilibrium:
    profile: StrategyProfile
    lambda_bar: ThresholdResult


def elite_profile(spec):
    return StrategyProfile(tuple(Fraction(int(spec.is_elite(i))) for i in range(spec.n)))


def elite_equilibrium(spec):
    """Elites vote p* when uninformed, everyone else votes p_*."""
    from .correlation import elite_adverse

    check = elite_adverse(spec)
    if not check.holds:
        raise NotAdverse("problem is not elite-adversely correlated")
    prof = elite_profile(spec)
    return EliteEquilibrium(prof, lambda_threshold(spec, prof))
