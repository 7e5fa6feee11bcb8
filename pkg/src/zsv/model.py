"""Problem specifications, assumption checks, and the informed-core / lambda split."""

import itertools
import math
from collections import defaultdict, namedtuple
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .numeric import FLOAT_TOL, is_exact, to_number

PERFECT = "perfect"
AGGREGATE = "aggregate"
DISTRIBUTIONAL = "distributional"
SIGNAL_TECHS = (PERFECT, AGGREGATE, DISTRIBUTIONAL)

UNINFORMED = 0
WIN_SIGNAL = 1
LOSE_SIGNAL = 2

STATE_CAP = 2 * 10**6


class SpecError(ValueError):
    """Malformed input: bad distribution, bad sizes, out-of-range parameters."""


class CapExceeded(RuntimeError):
    """The explicit state space would be larger than the enumeration cap."""


State = namedtuple("State", "payoffs signals prob")


def _check_lambda(lam):
    if lam is None:
        raise SpecError("lambda is required here")
    if not 0 < lam < 1:
        raise SpecError(f"lambda must lie in (0, 1), got {lam}")
    return lam


def _check_mass(probs, what):
    if any(p < 0 for p in probs):
        raise SpecError(f"{what} has negative mass")
    total = sum(probs)
    if is_exact(*probs):
        if total != 1:
            raise SpecError(f"{what} sums to {total}, not 1")
    elif abs(total - 1) > 1e-12:
        raise SpecError(f"{what} sums to {total}, not 1")


@dataclass(frozen=True)
class BinaryChoiceSpec:
    """Exchangeable problem where every voter either wins (+vw) or loses (-vl).

    winner_dist[w] is the probability that exactly w voters are winners, the
    winner set being uniform among sets of that size.
    """

    n: int
    winner_dist: tuple
    vw: object
    vl: object
    signals: str = PERFECT
    lam: object = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 3 or self.n % 2 == 0:
            raise SpecError(f"n must be an odd integer >= 3, got {self.n!r}")
        if len(self.winner_dist) != self.n + 1:
            raise SpecError(f"winner_dist needs {self.n + 1} entries, got {len(self.winner_dist)}")
        _check_mass(self.winner_dist, "winner_dist")
        if not (self.vw > 0 and self.vl > 0):
            raise SpecError("payoffs must satisfy vw > 0 and vl > 0")
        if self.signals not in SIGNAL_TECHS:
            raise SpecError(f"unknown signal technology {self.signals!r}")
        if self.signals == DISTRIBUTIONAL and not self.is_degenerate:
            raise SpecError("distributional news needs a degenerate winner count")
        if self.lam is not None:
            _check_lambda(self.lam)

    @property
    def tau(self):
        return (self.n - 1) // 2

    @property
    def support(self):
        return [w for w, p in enumerate(self.winner_dist) if p > 0]

    @property
    def is_degenerate(self):
        return len(self.support) == 1

    @property
    def exact(self):
        return is_exact(self.vw, self.vl, *self.winner_dist) and (self.lam is None or is_exact(self.lam))

    def mean_winners(self):
        return sum(w * p for w, p in enumerate(self.winner_dist))

    def win_gap(self, w):
        """Payoff difference of a voter who is a winner with probability w/n."""
        return Fraction(w, self.n) * self.vw - Fraction(self.n - w, self.n) * self.vl

    def prior_gap(self):
        return sum(p * self.win_gap(w) for w, p in enumerate(self.winner_dist) if p)

    def with_payoffs(self, vw, vl):
        return replace(self, vw=vw, vl=vl)

    def with_lambda(self, lam):
        return replace(self, lam=lam)

    def as_float(self):
        return replace(
            self,
            winner_dist=tuple(float(p) for p in self.winner_dist),
            vw=float(self.vw),
            vl=float(self.vl),
            lam=None if self.lam is None else float(self.lam),
        )


def fixed_count(n, w, vw, vl, signals=PERFECT, lam=None):
    dist = tuple(Fraction(int(k == w)) for k in range(n + 1))
    return BinaryChoiceSpec(n, dist, to_number(vw), to_number(vl), signals, lam)


def fixed_fraction(q, vw, vl, n, signals=PERFECT, lam=None):
    """Problem with exactly ceil(q n) winners."""
    q = to_number(q)
    return fixed_count(n, math.ceil(q * n), vw, vl, signals, lam)


def from_dist(dist, vw, vl, signals=PERFECT, lam=None):
    dist = tuple(to_number(p) for p in dist)
    return BinaryChoiceSpec(len(dist) - 1, dist, to_number(vw), to_number(vl), signals,
                            None if lam is None else to_number(lam))


@dataclass(frozen=True)
class ExplicitProblem:
    """Finite state space listed state by state.

    Signals are small integers; 0 is the uninformative signal. good and bad
    partition the informative labels that occur.
    """

    n: int
    states: tuple
    good: frozenset
    bad: frozenset
    groups: tuple = None  # optional voter grouping, e.g. elites first

    @property
    def tau(self):
        return (self.n - 1) // 2

    def total(self):
        return sum(s.prob for s in self.states)

    def labels(self):
        return sorted({x for s in self.states for x in s.signals if x != UNINFORMED})

    def is_core(self):
        return all(UNINFORMED not in s.signals for s in self.states)

    def with_payoff_map(self, fn):
        """Replace every payoff coordinate v by fn(v) and re-derive good/bad labels."""
        states = tuple(State(tuple(fn(v) for v in s.payoffs), s.signals, s.prob) for s in self.states)
        good, bad = signal_partition(states, self.n)
        return ExplicitProblem(self.n, states, good, bad, self.groups)


def _merge(items):
    acc = {}
    for key, p in items:
        acc[key] = acc.get(key, 0) + p
    return tuple(State(k[0], k[1], p) for k, p in sorted(acc.items(), key=_state_order) if p != 0)


def _state_order(item):
    (payoffs, signals), _ = item
    return (signals, tuple(float(v) for v in payoffs))


def signal_partition(states, n, voter=0):
    """Good/bad labels from the sign of E[v_i | S_i = s]."""
    mass = defaultdict(int)
    val = defaultdict(int)
    for s in states:
        k = s.signals[voter]
        if k == UNINFORMED or s.prob == 0:
            continue
        mass[k] += s.prob
        val[k] += s.prob * s.payoffs[voter]
    good = frozenset(k for k in mass if val[k] > 0)
    bad = frozenset(k for k in mass if val[k] < 0)
    return good, bad


def dilute(core, lam):
    """Full problem in which each voter independently keeps the core signal
    with probability lam and sees the uninformative signal otherwise."""
    _check_lambda(lam)
    if not core.is_core():
        raise SpecError("dilute needs a core with every voter informed")
    n = core.n
    if len(core.states) * 2**n > STATE_CAP:
        raise CapExceeded(f"{len(core.states) * 2**n} states exceed cap {STATE_CAP}")
    weight = [lam**m * (1 - lam) ** (n - m) for m in range(n + 1)]
    masks = list(itertools.product((False, True), repeat=n))
    items = []
    for st in core.states:
        for mask in masks:
            sig = tuple(x if keep else UNINFORMED for x, keep in zip(st.signals, mask))
            items.append(((st.payoffs, sig), st.prob * weight[sum(mask)]))
    return ExplicitProblem(n, _merge(items), core.good, core.bad, core.groups)


def extract_core(problem):
    """Recover (core, lambda) from a diluted problem."""
    n = problem.n
    lam = sum(s.prob for s in problem.states if s.signals[0] != UNINFORMED)
    full = lam**n
    if full == 0:
        raise SpecError("no informed states, cannot extract a core")
    states = tuple(
        State(s.payoffs, s.signals, s.prob / full)
        for s in problem.states
        if UNINFORMED not in s.signals
    )
    return ExplicitProblem(n, states, problem.good, problem.bad, problem.groups), lam


def realize_core(spec):
    """Informed core of a binary spec: every voter holds an informative signal."""
    n = spec.n
    if sum(math.comb(n, w) for w in spec.support) > STATE_CAP:
        raise CapExceeded("core too large to enumerate")
    items = []
    for w in spec.support:
        pw = spec.winner_dist[w]
        each = pw / math.comb(n, w)
        for winners in itertools.combinations(range(n), w):
            won = set(winners)
            payoffs = tuple(spec.vw if j in won else -spec.vl for j in range(n))
            if spec.signals == AGGREGATE:
                signals = (w + 1,) * n
            else:
                signals = tuple(WIN_SIGNAL if j in won else LOSE_SIGNAL for j in range(n))
            items.append(((payoffs, signals), each))
    states = _merge(items)
    if spec.signals == AGGREGATE:
        good = frozenset(w + 1 for w in spec.support if spec.win_gap(w) > 0)
        bad = frozenset(w + 1 for w in spec.support if spec.win_gap(w) < 0)
    else:
        good, bad = frozenset({WIN_SIGNAL}), frozenset({LOSE_SIGNAL})
        good = frozenset(k for k in good if any(k in s.signals for s in states))
        bad = frozenset(k for k in bad if any(k in s.signals for s in states))
    return ExplicitProblem(n, states, good, bad)


def realize_binary(spec, lam=None):
    lam = spec.lam if lam is None else lam
    return dilute(realize_core(spec), _check_lambda(lam))


# ---------------------------------------------------------------- elites


@dataclass(frozen=True)
class EliteSpec:
    """Perfect-news binary problem whose first `elites` voters win whenever
    any other voter wins."""

    base: BinaryChoiceSpec
    elites: int

    def __post_init__(self):
        if self.base.signals != PERFECT:
            raise SpecError("elite problems use perfect news")
        if not isinstance(self.elites, int) or self.elites < 0:
            raise SpecError("elite count must be a non-negative integer")
        if self.elites > self.base.n:
            raise SpecError("more elites than voters")

    @property
    def n(self):
        return self.base.n

    @property
    def tau(self):
        return self.base.tau

    def split(self, w):
        """(elite winners, non-elite winners) when w voters win."""
        e = self.elites
        return min(w, e), max(w - e, 0)

    def is_elite(self, voter):
        return voter < self.elites

    def prior_win(self, elite):
        e, n = self.elites, self.n
        if elite:
            return sum(p * Fraction(self.split(w)[0], e) for w, p in enumerate(self.base.winner_dist) if p)
        return sum(p * Fraction(self.split(w)[1], n - e) for w, p in enumerate(self.base.winner_dist) if p)

    def prior_gap(self, elite):
        pw = self.prior_win(elite)
        return pw * self.base.vw - (1 - pw) * self.base.vl


def realize_elite_core(spec):
    base, e, n = spec.base, spec.elites, spec.n
    items = []
    for w in base.support:
        we, wn = spec.split(w)
        each = base.winner_dist[w] / (math.comb(e, we) * math.comb(n - e, wn))
        for ew in itertools.combinations(range(e), we):
            for nw in itertools.combinations(range(e, n), wn):
                won = set(ew) | set(nw)
                payoffs = tuple(base.vw if j in won else -base.vl for j in range(n))
                signals = tuple(WIN_SIGNAL if j in won else LOSE_SIGNAL for j in range(n))
                items.append(((payoffs, signals), each))
    states = _merge(items)
    groups = (tuple(range(e)), tuple(range(e, n)))
    return ExplicitProblem(n, states, frozenset({WIN_SIGNAL}), frozenset({LOSE_SIGNAL}), groups)


def realize_elite(spec, lam):
    return dilute(realize_elite_core(spec), _check_lambda(lam))


# ---------------------------------------------------------------- populations


@dataclass(frozen=True)
class PopulationSpec:
    """Electorate size drawn from a finite distribution; one binary spec per size."""

    support: tuple
    probs: tuple
    specs: tuple

    def __post_init__(self):
        if not self.support or len(self.support) != len(self.probs) or len(self.specs) != len(self.support):
            raise SpecError("support, probs and specs must align")
        if any((not isinstance(n, int)) or n < 3 or n % 2 == 0 for n in self.support):
            raise SpecError("population sizes must be odd integers >= 3")
        if len(set(self.support)) != len(self.support):
            raise SpecError("population support has duplicates")
        _check_mass(self.probs, "population distribution")
        for n, s in zip(self.support, self.specs):
            if s.n != n:
                raise SpecError(f"spec for size {n} has n={s.n}")

    @classmethod
    def from_family(cls, family, support, probs):
        return cls(tuple(support), tuple(probs), tuple(family(n) for n in support))

    @property
    def n0(self):
        return min(n for n, p in zip(self.support, self.probs) if p > 0)

    @property
    def mu(self):
        return sum(n * p for n, p in zip(self.support, self.probs))

    def spec_at(self, n):
        return self.specs[self.support.index(n)]

    def size_biased(self):
        """Posterior over the electorate size held by a voter who was drawn into it."""
        mu = self.mu
        return {n: n * p / mu for n, p in zip(self.support, self.probs) if p > 0}


# ---------------------------------------------------------------- validation


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    counterexample: object = None


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def add(self, name, ok, detail="", counterexample=None):
        self.checks.append(Check(name, bool(ok), detail, counterexample))

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _nonzero(x):
    if isinstance(x, (int, Fraction)):
        return x != 0
    return abs(x) > FLOAT_TOL


def validate_spec(spec):
    if isinstance(spec, BinaryChoiceSpec):
        return _validate_binary(spec)
    if isinstance(spec, ExplicitProblem):
        return _validate_explicit(spec)
    if isinstance(spec, EliteSpec):
        return _validate_elite(spec)
    if isinstance(spec, PopulationSpec):
        return _validate_population(spec)
    raise TypeError(f"cannot validate {type(spec).__name__}")


# conditioning events are scanned only while the table stays cheap; larger
# problems rely on the closed forms used downstream
EVENT_SCAN_BUDGET = 2 * 10**5


def _validate_binary(spec, report=None):
    from .probability import z_table

    report = report or ValidationReport()
    n, tau = spec.n, spec.tau
    prior = spec.prior_gap()
    report.add("ex-ante optimality", prior > 0 if is_exact(prior) else prior > FLOAT_TOL,
               f"prior payoff difference {prior}")
    report.add("strict prior", _nonzero(prior), f"prior payoff difference {prior}",
               None if _nonzero(prior) else "prior")
    support = spec.support
    if spec.signals == AGGREGATE:
        flat = [w for w in support if not _nonzero(spec.win_gap(w))]
        report.add("strict signals", not flat, "", {"winner_count": flat[0]} if flat else None)
        bad_possible = any(spec.win_gap(w) < 0 for w in support)
        good_possible = any(spec.win_gap(w) > 0 for w in support)
    else:
        report.add("strict signals", True)
        bad_possible = any(w < n for w in support)
        good_possible = any(w >= tau for w in support)
    report.add("bad news possible", bad_possible, "P(B >= 1) > 0")
    report.add("enough good news possible", good_possible, "P(G >= tau) > 0")
    if n * n * len(support) <= EVENT_SCAN_BUDGET:
        table = z_table(spec)
        bad_event = None
        for (g, m), cp in sorted(table.items()):
            if cp.prob != 0 and not _nonzero(cp.conditional):
                bad_event = {"g": g, "m": m}
                break
        report.add("strict conditional events", bad_event is None,
                   "V(G=g, M=m, S_i=s0) != 0 on non-null events", bad_event)
    return report


def _validate_explicit(problem):
    report = ValidationReport()
    n = problem.n
    if n < 3 or n % 2 == 0:
        raise SpecError("n must be odd and >= 3")
    for st in problem.states:
        if len(st.payoffs) != n or len(st.signals) != n:
            raise SpecError("state coordinates do not match n")
    _check_mass([s.prob for s in problem.states], "state distribution")
    states = [s for s in problem.states if s.prob != 0]

    # exchangeability: equal mass across every orbit, and full orbits
    orbits = defaultdict(list)
    for st in states:
        orbits[tuple(sorted(zip(st.signals, st.payoffs), key=_pair_order))].append(st)
    bad_orbit = None
    for key, members in orbits.items():
        counts = defaultdict(int)
        for pair in key:
            counts[pair] += 1
        size = math.factorial(n)
        for c in counts.values():
            size //= math.factorial(c)
        if len(members) != size or len({m.prob for m in members}) != 1:
            bad_orbit = members[0]
            break
    if problem.groups is None:
        report.add("exchangeability", bad_orbit is None, "", bad_orbit)

    # 2(a): s^0 is independent of everything else
    bad_2a = None
    for i in range(n):
        q = sum(s.prob for s in states if s.signals[i] == UNINFORMED)
        rest = defaultdict(int)
        for s in states:
            rest[_drop(s, i)] += s.prob
        for s in states:
            if s.signals[i] == UNINFORMED and s.prob != rest[_drop(s, i)] * q:
                bad_2a = s
                break
        if bad_2a or q == 0:
            bad_2a = bad_2a or "voter never uninformed"
            break
    report.add("uninformative signal", bad_2a is None, "", bad_2a)

    # conditional payoffs by own signal and by full signal profile
    own = defaultdict(lambda: [0, 0])
    prof = defaultdict(lambda: [0, 0])
    for s in states:
        for i in range(n):
            k = s.signals[i]
            if k == UNINFORMED:
                continue
            own[(i, k)][0] += s.prob
            own[(i, k)][1] += s.prob * s.payoffs[i]
            prof[(i, s.signals)][0] += s.prob
            prof[(i, s.signals)][1] += s.prob * s.payoffs[i]
    bad_2b = None
    for (i, sig), (mass, val) in prof.items():
        m0, v0 = own[(i, sig[i])]
        if (val > 0) != (v0 > 0) or (val < 0) != (v0 < 0):
            bad_2b = {"voter": i, "signals": sig}
            break
    report.add("signal sign consistency", bad_2b is None, "", bad_2b)

    flat = [k for (i, k), (m, v) in own.items() if not _nonzero(v)]
    mislabeled = [k for (i, k), (m, v) in own.items()
                  if (v > 0 and k not in problem.good) or (v < 0 and k not in problem.bad)]
    report.add("strict signals", not flat, "", {"signal": flat[0]} if flat else None)
    report.add("signal labels", not mislabeled, "good/bad sets match conditional payoffs",
               {"signal": mislabeled[0]} if mislabeled else None)

    for i in _representatives(problem):
        prior = sum(s.prob * s.payoffs[i] for s in states)
        report.add(f"ex-ante optimality (voter {i})", prior > 0, f"prior payoff difference {prior}")

    bad_event = None
    for i in _representatives(problem):
        ev = defaultdict(lambda: [0, 0])
        for s in states:
            if s.signals[i] != UNINFORMED:
                continue
            others = [x for j, x in enumerate(s.signals) if j != i]
            m = sum(1 for x in others if x != UNINFORMED)
            g = sum(1 for x in others if x in problem.good)
            ev[(g, m)][0] += s.prob
            ev[(g, m)][1] += s.prob * s.payoffs[i]
        for key, (mass, val) in sorted(ev.items()):
            if mass and not _nonzero(val):
                bad_event = {"voter": i, "g": key[0], "m": key[1]}
                break
        if bad_event:
            break
    report.add("strict conditional events", bad_event is None, "", bad_event)

    tau = problem.tau
    report.add("bad news possible",
               any(any(x in problem.bad for x in s.signals) for s in states), "P(B >= 1) > 0")
    report.add("enough good news possible",
               any(sum(x in problem.good for x in s.signals) >= tau for s in states), "P(G >= tau) > 0")
    return report


def _pair_order(pair):
    return (pair[0], float(pair[1]))


def _drop(state, i):
    return (state.payoffs, state.signals[:i] + (None,) + state.signals[i + 1:])


def _representatives(problem):
    if problem.groups is None:
        return [0]
    return [g[0] for g in problem.groups if g]


def _validate_elite(spec):
    report = _validate_binary(spec.base)
    e, tau = spec.elites, spec.tau
    report.add("elite minority", 1 <= e < tau, f"e={e}, tau={tau}")
    if e >= 1:
        report.add("ex-ante optimality (elite)", spec.prior_gap(True) > 0, str(spec.prior_gap(True)))
    if e < spec.n:
        report.add("ex-ante optimality (non-elite)", spec.prior_gap(False) > 0, str(spec.prior_gap(False)))
    return report


def _validate_population(pop):
    report = ValidationReport()
    for n, spec in zip(pop.support, pop.specs):
        sub = _validate_binary(spec)
        for c in sub.checks:
            report.add(f"n={n}: {c.name}", c.ok, c.detail, c.counterexample)
    return report


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True)
class StrategyProfile:
    """Probability that each voter votes p* after the uninformative signal.

    Informed voters follow their news; that part is implied, never stored.
    """

    probs: tuple

    def __post_init__(self):
        if any(not 0 <= p <= 1 for p in self.probs):
            raise SpecError("profile entries must lie in [0, 1]")

    @classmethod
    def symmetric(cls, n, alpha):
        return cls((alpha,) * n)

    @classmethod
    def sanguine(cls, n, t):
        """First t voters vote p* when uninformed, the rest vote p_*."""
        return cls(tuple(Fraction(int(i < t)) for i in range(n)))

    @property
    def n(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    @property
    def is_pure(self):
        return all(p in (0, 1) for p in self.probs)

    @property
    def is_symmetric(self):
        return len(set(self.probs)) == 1

    @property
    def alpha(self):
        return self.probs[0] if self.is_symmetric else None

    def label(self):
        from .numeric import fmt

        if self.is_symmetric:
            a = self.probs[0]
            if a in (0, 1):
                return f"sigma^{int(a)}"
            return f"alpha={fmt(a)}"
        if self.is_pure:
            return "pure:" + "".join(str(int(p)) for p in self.probs)
        return "mixed:" + ";".join(fmt(p) for p in self.probs)
