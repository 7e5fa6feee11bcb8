"""Shared generators for randomized tests."""

import math
import random
from fractions import Fraction as F

from hypothesis import strategies as st

from zsv.model import AGGREGATE, PERFECT, SpecError, from_dist, validate_spec


def random_dist(rng, n, max_support=3):
    k = rng.randint(1, max_support)
    sup = rng.sample(range(n + 1), k)
    weights = [rng.randint(1, 9) for _ in sup]
    total = sum(weights)
    dist = [F(0)] * (n + 1)
    for w, x in zip(sup, weights):
        dist[w] = F(x, total)
    return dist


def random_binary(rng, n, signals=PERFECT, tries=200):
    """A binary spec passing validation."""
    for _ in range(tries):
        dist = random_dist(rng, n)
        vw, vl = rng.randint(1, 8), rng.randint(1, 8)
        try:
            spec = from_dist(dist, vw, vl, signals)
        except SpecError:
            continue
        if spec.prior_gap() > 0 and validate_spec(spec).ok:
            return spec
    raise RuntimeError("no spec found")


def random_profile(rng, n, mixed=2):
    probs = [F(rng.randint(0, 1)) for _ in range(n)]
    for j in rng.sample(range(n), min(mixed, n)):
        probs[j] = F(rng.randint(1, 6), 7)
    return tuple(probs)


@st.composite
def binary_specs(draw, ns=(3, 5, 7), signals=PERFECT):
    n = draw(st.sampled_from(ns))
    seed = draw(st.integers(0, 10**6))
    return random_binary(random.Random(seed), n, signals)


@st.composite
def aggregate_specs(draw, ns=(3, 5, 7)):
    return draw(binary_specs(ns, AGGREGATE))


lambdas = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50)


def noisy_labels(rng, n, tries=200):
    """Distributional-news core: a fixed number of winners, each voter's label
    drawn from a winner or a loser label distribution.

    Every label belongs to one side; a mixed label would flip sign once the
    others' labels pin down the winner count.
    """
    import itertools

    from zsv.model import ExplicitProblem, State, dilute, signal_partition, validate_spec

    for _ in range(tries):
        w = rng.randint(n // 2 + 1, n - 1)
        k = rng.randint(2, 3)
        sides = [rng.random() < 0.5 for _ in range(k)]
        sides[0], sides[-1] = True, False
        qw = [F(rng.randint(1, 9)) if side else F(0) for side in sides]
        ql = [F(0) if side else F(rng.randint(1, 9)) for side in sides]
        loss = F(rng.randint(1, 12), 4)
        qw = [x / sum(qw) for x in qw]
        ql = [x / sum(ql) for x in ql]
        acc = {}
        for winners in itertools.combinations(range(n), w):
            pay = tuple(F(1) if j in winners else -loss for j in range(n))
            for sig in itertools.product(range(1, k + 1), repeat=n):
                p = F(1, math.comb(n, w))
                for j, s in enumerate(sig):
                    p *= (qw if j in winners else ql)[s - 1]
                if p:
                    acc[(pay, sig)] = acc.get((pay, sig), 0) + p
        states = tuple(State(v, s, p) for (v, s), p in sorted(acc.items()))
        good, bad = signal_partition(states, n)
        prob = ExplicitProblem(n, states, good, bad)
        if validate_spec(dilute(prob, F(1, 2))).ok:
            return prob
    raise RuntimeError("no problem found")
