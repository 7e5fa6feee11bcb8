"""Small named problems used by the reproduction table, the tests and the CLI."""

from fractions import Fraction as F

from .model import AGGREGATE, EliteSpec, PopulationSpec, fixed_count, fixed_fraction, from_dist
from .scenario import BINARY, ELITE, POPULATION, Scenario
from .simulate import FracFamily


def intro():
    """Three voters, two winners at +2, one loser at -3."""
    return fixed_count(3, 2, 2, 3)


def agg5():
    """Five voters, winner count uniform on 1..5, aggregate news, v = (1, 1)."""
    return from_dist([0] + [F(1, 5)] * 5, 1, 1, AGGREGATE)


def frac(n, q=F(2, 3), vw=2, vl=3):
    return fixed_fraction(q, vw, vl, n)


FRAC = FracFamily(F(2, 3), 2, 3)


def asym5():
    """Adverse with V^G(1) < 0 < V^G(2): the suspicious profile is asymmetric."""
    return from_dist([0, 0, F(9, 10), 0, 0, F(1, 10)], 4, 3)


def strong5():
    """Strongly adverse with V^G(tau) > 0, so the p_*-electing equilibrium is mixed."""
    return from_dist([0, F(3, 4), 0, F(1, 4), 0, 0], 5, 2)


def case2():
    """Common value: all win or all lose, so bad news from tau others is damning."""
    return from_dist([F(1, 20), 0, 0, 0, 0, F(19, 20)], 1, 1)


def case3():
    """One loser among five, so tau bad-news reports never happen."""
    return fixed_fraction(F(4, 5), 2, 1, 5)


def elite_base7():
    return from_dist([0, 0, 0, 0, F(1, 3), F(1, 3), F(1, 3), 0], 3, 4)


def elite7(e=2):
    return EliteSpec(elite_base7(), e)


def pop35():
    """Electorate of 3 or 5 with two thirds winners."""
    return PopulationSpec.from_family(FRAC.at, (3, 5), (F(1, 2), F(1, 2)))


def scenarios():
    """Named scenarios, in a stable order."""
    return {
        "intro": Scenario(BINARY, intro(), F(1, 4), "intro", F(2, 3)),
        "agg5": Scenario(BINARY, agg5(), F(1, 10), "agg5"),
        "asym5": Scenario(BINARY, asym5(), F(1, 1000), "asym5"),
        "strong5": Scenario(BINARY, strong5(), F(1, 1000), "strong5"),
        "case2": Scenario(BINARY, case2(), F(1, 1000), "case2"),
        "case3": Scenario(BINARY, case3(), F(1, 100), "case3", F(4, 5)),
        "frac101": Scenario(BINARY, frac(101), F(1, 4), "frac101", F(2, 3)),
        "elite7": Scenario(ELITE, elite7(), F(1, 1000), "elite7"),
        "pop35": Scenario(POPULATION, pop35(), F(1, 1000), "pop35", F(2, 3)),
    }
