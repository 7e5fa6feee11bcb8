"""Scenario files and the structured text form shared with machine-readable reports.

The format is JSON with rationals written as "a/b" strings. Any string that
reads as an integer or a ratio of integers parses back to a Fraction.
"""

import dataclasses
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (SIGNAL_TECHS, BinaryChoiceSpec, EliteSpec, ExplicitProblem, PopulationSpec,
                    SpecError, State, UNINFORMED, dilute, from_dist, signal_partition)
from .numeric import fmt, to_number

BINARY = "binary"
EXPLICIT = "explicit"
ELITE = "elite"
POPULATION = "population"
KINDS = (BINARY, EXPLICIT, ELITE, POPULATION)

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class ScenarioError(SpecError):
    """Scenario text that does not describe a valid problem."""


# ---------------------------------------------------------------- structured text


def to_plain(obj):
    """Convert reports and numbers into JSON-ready values with stable field order."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return fmt(x)
        return float(format(x, ".12g"))
    if isinstance(obj, np.integer):
        return int(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (frozenset, set)) else obj
        return [to_plain(x) for x in items]
    if hasattr(obj, "probs"):  # StrategyProfile
        return to_plain(list(obj.probs))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_plain(obj):
    if isinstance(obj, str) and _RATIONAL.match(obj):
        return Fraction(obj)
    if isinstance(obj, list):
        return [from_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: from_plain(v) for k, v in obj.items()}
    return obj


def _render(x, depth):
    pad = "  " * depth
    if isinstance(x, dict):
        if not x:
            return "{}"
        body = ",\n".join(f"{pad}  {json.dumps(k)}: {_render(v, depth + 1)}" for k, v in x.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(x, list):
        if all(not isinstance(y, (dict, list)) for y in x):
            return "[" + ", ".join(json.dumps(y, ensure_ascii=False) for y in x) + "]"
        body = ",\n".join(f"{pad}  {_render(y, depth + 1)}" for y in x)
        return "[\n" + body + "\n" + pad + "]"
    return json.dumps(x, ensure_ascii=False)


def dumps(obj):
    """Structured text: indented JSON with scalar lists kept on one line."""
    return _render(to_plain(obj), 0) + "\n"


def parse(text):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid structured text: {exc}") from None
    return from_plain(raw)


# ---------------------------------------------------------------- scenarios


@dataclass(frozen=True)
class Scenario:
    kind: str
    problem: object
    lam: object = None
    name: str = ""
    fraction: object = None

    @property
    def n(self):
        if isinstance(self.problem, PopulationSpec):
            return self.problem.n0
        return self.problem.n

    def family(self):
        """The fixed-fraction family behind a binary scenario, if it has one."""
        from .simulate import FracFamily

        if self.fraction is None:
            return None
        p = self.problem
        return FracFamily(self.fraction, p.vw, p.vl)


def _num(d, key, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ScenarioError(f"missing field {key!r}")
    try:
        return to_number(d[key])
    except (TypeError, ValueError, ZeroDivisionError):
        raise ScenarioError(f"field {key!r} is not a number: {d[key]!r}") from None


def _winners(d, n):
    w = d.get("winners")
    if not isinstance(w, dict):
        raise ScenarioError("missing winners block")
    if "dist" in w:
        dist = [to_number(x) for x in w["dist"]]
        if n is not None and len(dist) != n + 1:
            raise ScenarioError(f"winners.dist needs {n + 1} entries")
        return dist, None
    if "fixed_fraction" in w:
        if n is None:
            raise ScenarioError("fixed_fraction needs n")
        q = _num(w, "fixed_fraction")
        if not 0 < q <= 1:
            raise ScenarioError("fixed_fraction must lie in (0, 1]")
        k = math.ceil(q * n)
        return [Fraction(int(j == k)) for j in range(n + 1)], q
    if "count" in w:
        k = int(w["count"])
        return [Fraction(int(j == k)) for j in range(n + 1)], None
    raise ScenarioError("winners needs dist, fixed_fraction or count")


def _binary(d, n, lam):
    pay = d.get("payoffs") or {}
    vw, vl = _num(pay, "vw"), _num(pay, "vl")
    signals = d.get("signals", "perfect")
    if signals not in SIGNAL_TECHS:
        raise ScenarioError(f"signals must be one of {', '.join(SIGNAL_TECHS)}")
    dist, q = _winners(d, n)
    return from_dist(dist, vw, vl, signals), q


def _explicit(d, n, lam):
    rows = d.get("states")
    if not rows:
        raise ScenarioError("explicit scenarios need a states list")
    states = []
    for r in rows:
        pay = tuple(to_number(x) for x in r["payoffs"])
        sig = tuple(int(x) for x in r["signals"])
        if len(pay) != n or len(sig) != n:
            raise ScenarioError("state length differs from n")
        states.append(State(pay, sig, to_number(r["prob"])))
    if sum(s.prob for s in states) != 1:
        raise ScenarioError("state probabilities do not sum to 1")
    states = tuple(states)
    if "good" in d or "bad" in d:
        good = frozenset(int(x) for x in d.get("good", ()))
        bad = frozenset(int(x) for x in d.get("bad", ()))
    else:
        good, bad = signal_partition(states, n)
    return ExplicitProblem(n, states, good, bad)


def load_dict(d, name=""):
    if not isinstance(d, dict):
        raise ScenarioError("a scenario is a key/value mapping")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind must be one of {', '.join(KINDS)}")
    lam = _num(d, "lambda") if d.get("lambda") is not None else None
    if lam is not None and not 0 < lam < 1:
        raise ScenarioError("lambda must lie in (0, 1)")
    try:
        if kind == POPULATION:
            pop = d.get("population") or {}
            support = tuple(int(x) for x in pop.get("support", ()))
            probs = tuple(to_number(x) for x in pop.get("probs", ()))
            specs = []
            q = None
            for n in support:
                spec, q = _binary(d, n, lam)
                specs.append(spec)
            return Scenario(kind, PopulationSpec(support, probs, tuple(specs)), lam, name, q)
        n = d.get("n")
        if not isinstance(n, int):
            raise ScenarioError("n must be an integer")
        if kind == EXPLICIT:
            return Scenario(kind, _explicit(d, n, lam), lam, name)
        spec, q = _binary(d, n, lam)
        if kind == ELITE:
            count = (d.get("elites") or {}).get("count")
            if not isinstance(count, int):
                raise ScenarioError("elite scenarios need elites.count")
            return Scenario(kind, EliteSpec(spec, count), lam, name, q)
        return Scenario(kind, spec, lam, name, q)
    except ScenarioError:
        raise
    except (SpecError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(str(exc)) from None


def loads(text, name=""):
    return load_dict(parse(text), name)


def load(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads(text, str(path))


def _binary_fields(spec, q=None):
    d = {"n": spec.n}
    d["payoffs"] = {"vw": spec.vw, "vl": spec.vl}
    if q is not None:
        d["winners"] = {"fixed_fraction": q}
    else:
        d["winners"] = {"dist": list(spec.winner_dist)}
    d["signals"] = spec.signals
    return d


def scenario_dict(sc):
    """Inverse of load_dict."""
    p = sc.problem
    out = {"kind": sc.kind}
    if sc.kind == BINARY:
        out.update(_binary_fields(p, sc.fraction))
    elif sc.kind == ELITE:
        out.update(_binary_fields(p.base, sc.fraction))
        out["elites"] = {"count": p.elites}
    elif sc.kind == POPULATION:
        if sc.fraction is None:
            raise ScenarioError("population scenarios are written with a fixed fraction")
        first = p.specs[0]
        out["payoffs"] = {"vw": first.vw, "vl": first.vl}
        out["winners"] = {"fixed_fraction": sc.fraction}
        out["signals"] = first.signals
        out["population"] = {"support": list(p.support), "probs": list(p.probs)}
    else:
        out["n"] = p.n
        out["states"] = [{"payoffs": list(s.payoffs), "signals": list(s.signals), "prob": s.prob}
                         for s in p.states]
        out["good"] = sorted(p.good)
        out["bad"] = sorted(p.bad)
    if sc.lam is not None:
        out["lambda"] = sc.lam
    return out


def dump(sc, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(scenario_dict(sc)))


def diluted(sc, lam=None):
    """Explicit problem with the uninformative signal spelled out."""
    p = sc.problem
    lam = sc.lam if lam is None else lam
    if isinstance(p, ExplicitProblem) and p.is_core():
        return dilute(p, lam)
    return p


def has_uninformed(problem):
    return any(UNINFORMED in s.signals for s in problem.states)
