"""Correlation classes, the symmetric-equilibrium measure K*, large-election
thresholds and comparative statics."""

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from . import poly
from .model import (BinaryChoiceSpec, EliteSpec, ExplicitProblem, SpecError, State, UNINFORMED,
                    dilute, extract_core)
from .numeric import is_exact
from .probability import elite_z_table, vg_closed_form, vg_vector, z_table

ADVERSE = "Adverse"
ADVANTAGEOUS = "Advantageous"
EXACT = "exact"
NUMERIC = "numeric"
NEG_INF = "-inf"


@dataclass
class KStar:
    sign: int
    value: object  # a number, or NEG_INF when the leading coefficient is negative
    witness_theta: object = None
    method: str = EXACT

    @property
    def sign_symbol(self):
        return {-1: "-", 0: "0", 1: "+"}[self.sign]


@dataclass
class CorrelationReport:
    vg_values: list
    classification: str
    witnesses: tuple = ()
    kappa_star: int = None
    kstar: KStar = None
    method: str = EXACT

    def to_dict(self):
        d = asdict(self)
        d["witnesses"] = list(self.witnesses)
        return d

    @classmethod
    def from_dict(cls, d):
        k = d.get("kstar")
        return cls(
            vg_values=list(d["vg_values"]),
            classification=d["classification"],
            witnesses=tuple(d.get("witnesses") or ()),
            kappa_star=d.get("kappa_star"),
            kstar=None if k is None else KStar(**k),
            method=d.get("method", EXACT),
        )

    def summary(self):
        head = self.classification
        if self.kappa_star is not None:
            head += f" (κ*={self.kappa_star})"
        if self.kstar is not None:
            head += f", K* sign {'−' if self.kstar.sign < 0 else self.kstar.sign_symbol}"
        return head


# ---------------------------------------------------------------- correlation class


def classify(problem, method=None):
    """Adverse iff some V^G(kappa) < 0 for kappa in 1..tau."""
    vgs = vg_vector(problem)
    tau = problem.tau
    neg = [k for k in range(1, tau + 1) if vgs[k] < 0]
    ks = kstar(problem, method)
    if neg:
        return CorrelationReport(vgs, ADVERSE, (min(neg), max(neg)), max(neg), ks, ks.method)
    return CorrelationReport(vgs, ADVANTAGEOUS, (), None, ks, ks.method)


# ---------------------------------------------------------------- K*


def k_coefficients(problem):
    """Coefficients of K(theta) = sum_k theta^k C(tau, k) Z(k, k), constant first."""
    tau = problem.tau
    if isinstance(problem, BinaryChoiceSpec):
        from .probability import LazyTable

        table = LazyTable(problem)
    else:
        table = z_table(problem)
    return [math.comb(tau, k) * table[(k, k)].value for k in range(tau + 1)]


def _nice_witness(p, x):
    # prefer a small integer inside the same negative stretch
    for t in range(max(1, math.floor(x)), math.ceil(x) + 2):
        if poly.evaluate(p, Fraction(t)) < 0:
            return Fraction(t)
    return x


def _kstar_exact(c):
    c = [Fraction(x) for x in c]
    p = poly.trim(c)
    if not p:
        raise ArithmeticError("K(theta) vanishes identically")
    neg, wit = poly.negative_somewhere(p, 0, math.inf)
    if p[-1] < 0:
        return KStar(-1, NEG_INF, _nice_witness(p, wit) if wit is not None else None, EXACT)
    crit = []
    dp = poly.derivative(p)
    if poly.trim(dp):
        for iv in poly.isolate_roots(dp, 0, math.inf):
            lo, hi = poly.refine(dp, iv, Fraction(1, 10**12))
            r = poly.rational_root_near(dp, (lo, hi))
            crit.append(r if r is not None else (lo + hi) / 2)
    values = [poly.evaluate(p, 0)] + [poly.evaluate(p, x) for x in crit]
    inf = min(values)
    if neg:
        return KStar(-1, float(inf) if not isinstance(inf, Fraction) else inf, _nice_witness(p, wit), EXACT)
    # no negative values: the infimum is zero exactly when K touches zero
    # on (0, inf) or its limit at 0+ is zero
    touches = bool(poly.isolate_roots(p, 0, math.inf)) or p[0] == 0
    if touches:
        return KStar(0, Fraction(0), None, EXACT)
    exact_inf = values.index(inf) == 0 or inf == 0
    return KStar(1, inf if exact_inf else float(inf), None, EXACT)


def _kstar_numeric(c, points=1024):
    c = [float(x) for x in c]
    scale = max(abs(x) for x in c)
    if scale == 0:
        raise ArithmeticError("K(theta) vanishes identically")
    lt = np.linspace(-6 * math.log(10), 6 * math.log(10), points)

    def k_of(u):
        return float(np.polyval(c[::-1], math.exp(u)))

    vals = np.polyval(c[::-1], np.exp(lt))
    best_u, best = lt[0], vals[0]
    for i in range(points):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < points - 1 else math.inf
        if vals[i] <= left and vals[i] <= right:
            lo = lt[max(i - 1, 0)]
            hi = lt[min(i + 1, points - 1)]
            if hi > lo:
                res = minimize_scalar(k_of, bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-12})
                u, v = float(res.x), float(res.fun)
            else:
                u, v = lt[i], vals[i]
            if v < best:
                best_u, best = u, v
    if c[0] <= best:
        # the infimum is approached as theta -> 0+
        best_u, best = -math.inf, c[0]
    tol = 1e-12 * scale
    if len(c) > 1 and c[-1] < 0:
        wit = math.exp(best_u) if best < 0 else 1e6
        return KStar(-1, NEG_INF, wit, NUMERIC)
    if best < -tol:
        return KStar(-1, best, math.exp(best_u), NUMERIC)
    if abs(best) <= tol:
        return KStar(0, 0.0, None, NUMERIC)
    return KStar(1, best, None, NUMERIC)


def kstar(problem, method=None):
    """Sign and value of inf over theta > 0 of K(theta)."""
    c = k_coefficients(problem)
    if method is None:
        method = EXACT if is_exact(*c) else NUMERIC
    if method == EXACT:
        return _kstar_exact(c)
    if method == NUMERIC:
        return _kstar_numeric(c)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- large elections


def rho_critical(q):
    q = Fraction(q)
    if q == 1:
        raise ValueError("q = 1 leaves no losers")
    if not Fraction(1, 2) <= q < 1:
        raise ValueError("q must lie in [1/2, 1)")
    return (q - Fraction(1, 2)) / (1 - q)


def adverse_at_n(q, payoffs, n):
    """Finite-n test: the n-voter fixed-fraction problem is adversely correlated."""
    vw, vl = (Fraction(x) for x in payoffs)
    w = math.ceil(Fraction(q) * n)
    if w >= n:
        return False
    tau = (n - 1) // 2
    return vl / vw > Fraction(w - tau, n - w)


def polarization_bound(q, payoffs):
    vw, vl = (Fraction(x) for x in payoffs)
    return 1 - rho_critical(q) * vw / vl


# ---------------------------------------------------------------- comparative statics


def lr_dominates(p_hi, p_lo):
    """p_hi likelihood-ratio dominates p_lo."""
    if len(p_hi) != len(p_lo):
        raise SpecError("distributions over different supports")
    k = len(p_hi)
    return all(p_hi[b] * p_lo[a] >= p_hi[a] * p_lo[b] for a in range(k) for b in range(a + 1, k))


@dataclass
class ACComparison:
    holds: bool
    per_kappa: list = field(default_factory=list)


def compare_ac(spec_a, spec_b):
    """Whether spec_a is at least as adversely correlated as spec_b."""
    if spec_a.n != spec_b.n:
        raise SpecError("compare_ac needs equal n")
    per = []
    for k in range(1, spec_a.tau + 1):
        va, vb = vg_closed_form(spec_a, k), vg_closed_form(spec_b, k)
        per.append({"kappa": k, "vg_a": va, "vg_b": vb, "ok": not (vb < 0) or va < 0})
    return ACComparison(all(r["ok"] for r in per), per)


# ---------------------------------------------------------------- news kinds


def _winners(payoffs):
    return sum(1 for v in payoffs if v > 0)


def news_kind_check(problem):
    """Check the aggregate-only and distributional-only identities on every
    non-null event.

    A core is checked as is: the uninformative signal is independent of
    everything, so the identities on fully informed profiles carry over to
    the diluted problem.
    """
    states = [s for s in problem.states if s.prob]
    p_w = {}
    p_vw = {}
    p_s = {}
    p_sw = {}
    p_vsw = {}
    for st in states:
        w = _winners(st.payoffs)
        p_w[w] = p_w.get(w, 0) + st.prob
        p_vw[(st.payoffs, w)] = p_vw.get((st.payoffs, w), 0) + st.prob
        p_s[st.signals] = p_s.get(st.signals, 0) + st.prob
        p_sw[(st.signals, w)] = p_sw.get((st.signals, w), 0) + st.prob
        p_vsw[(st.payoffs, st.signals, w)] = p_vsw.get((st.payoffs, st.signals, w), 0) + st.prob
    aggregate = True
    for (sig, w), mass in p_sw.items():
        for (v, ww), pv in p_vw.items():
            if ww != w:
                continue
            if p_vsw.get((v, sig, w), 0) * p_w[w] != pv * mass:
                aggregate = False
                break
        if not aggregate:
            break
    distributional = all(p_sw.get((sig, w), 0) == p_w[w] * ps for sig, ps in p_s.items() for w in p_w)
    return {"aggregate_only": aggregate, "distributional_only": distributional}


# ---------------------------------------------------------------- adversarialize


class PreconditionError(ValueError):
    pass


@dataclass
class AdversarialPayoffs:
    vw: object
    vl: object
    p_win: object
    p_star: object
    threshold: object
    good: frozenset

    def ratio(self):
        return self.vl / self.vw


def adversarialize(problem):
    """Binary payoffs under which a distributional-news problem becomes adverse."""
    if not news_kind_check(problem)["distributional_only"]:
        raise PreconditionError("signals carry more than distributional news")
    core = problem if problem.is_core() else extract_core(problem)[0]
    states = [s for s in core.states if s.prob]
    p_win = sum(s.prob for s in states if s.payoffs[0] > 0)
    mass = {}
    win = {}
    for s in states:
        k = s.signals[0]
        mass[k] = mass.get(k, 0) + s.prob
        if s.payoffs[0] > 0:
            win[k] = win.get(k, 0) + s.prob
    post = {k: win.get(k, 0) / m for k, m in mass.items()}
    order = sorted(post, key=lambda k: (-post[k], k))
    g_set = [k for k in order if post[k] >= p_win]
    b_set = [k for k in order if post[k] < p_win]
    if not b_set:
        raise PreconditionError("no signal lowers the winner probability")
    k_star = b_set[0]
    # winner probability of voter 0 when the only informed voter (voter 1)
    # reports a signal from the upper group
    num = sum(s.prob for s in states if s.signals[1] in g_set and s.payoffs[0] > 0)
    den = sum(s.prob for s in states if s.signals[1] in g_set)
    p_pair = num / den
    p_star = max(post[k_star], p_pair)
    if p_win <= p_star:
        raise PreconditionError(f"P(W) = {p_win} does not exceed P* = {p_star}")
    t = (p_star + p_win) / 2
    return AdversarialPayoffs(1 - t, t, p_win, p_star, t, frozenset(g_set))


def apply_payoffs(problem, vw, vl):
    return problem.with_payoff_map(lambda v: vw if v > 0 else -vl)


# ---------------------------------------------------------------- elites


def elite_event_payoff(base, e):
    """Non-elite payoff difference given s0, no bad news and tau - e non-elite
    good-news reports, under nested winners."""
    n, tau = base.n, base.tau
    num = 0
    den = 0
    for w in base.support:
        if w < tau:
            continue
        weight = math.comb(w - e, tau - e) * base.winner_dist[w]
        if not weight:
            continue
        num += (Fraction(w - tau, n - tau) * base.vw - Fraction(n - w, n - tau) * base.vl) * weight
        den += weight
    return num / den if den else 0


@dataclass
class EliteCheck:
    holds: bool
    conditions: dict


def elite_adverse(spec):
    e, tau = spec.elites, spec.tau
    if e >= tau:
        raise SpecError(f"elite count {e} must be below tau={tau}")
    a = e < tau
    if e >= 1:
        table_e = elite_z_table(spec, True)
        cell = table_e.get((0, tau - e + 1, 0, tau - e + 1))
        b_val = cell[1] / cell[0] if cell and cell[0] else 0
    else:
        b_val = None
    table_n = elite_z_table(spec, False)
    cell = table_n.get((0, tau - e, 0, tau - e))
    c_val = cell[1] / cell[0] if cell and cell[0] else 0
    c_closed = elite_event_payoff(spec.base, e)
    b_ok = True if b_val is None else b_val > 0
    cond = {
        "a": {"ok": a, "elites": e, "tau": tau},
        "b": {"ok": b_ok, "value": b_val},
        "c": {"ok": c_val < 0, "value": c_val, "closed_form": c_closed},
    }
    return EliteCheck(a and b_ok and c_val < 0, cond)
