"""Rendering of reports as text, structured text, or CSV."""

import csv
import io
import math
from fractions import Fraction

from .correlation import CorrelationReport
from .equilibrium import EquilibriumResult
from .numeric import fmt, fmt_decimal
from .oracle import PureEquilibrium
from .scenario import dumps
from .simulate import OutcomeDistribution, SweepTable

TEXT = "text"
MACHINE = "machine"
CSV = "csv"
FORMATS = (TEXT, MACHINE, CSV)


# text output abbreviates rationals past this denominator; machine output never does
_LONG = 10**12


def show(x):
    if isinstance(x, Fraction) and x.denominator > _LONG:
        return "~" + fmt(float(x))
    return fmt(x)


def signed(x):
    if x is None:
        return "none"
    s = show(x)
    body = s.lstrip("~")
    if body.startswith("-") or x == 0:
        return s
    return s[: len(s) - len(body)] + "+" + body


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _cell(x):
    # sweep cells are decimal so the table loads straight into plotting tools
    if isinstance(x, bool):
        return fmt(x)
    if isinstance(x, (int, Fraction, float)) and not (isinstance(x, float) and math.isinf(x)):
        return fmt_decimal(x)
    return fmt(x)


# ---------------------------------------------------------------- per type


def _correlation_text(r):
    lines = [r.summary()]
    lines.append("V^G: " + ", ".join(f"κ={k} {fmt(v)}" for k, v in enumerate(r.vg_values)))
    if r.witnesses:
        lines.append(f"negative V^G from κ={r.witnesses[0]} to κ={r.witnesses[1]}")
    k = r.kstar
    if k is not None:
        w = "" if k.witness_theta is None else f" (witness θ={fmt(k.witness_theta)})"
        lines.append(f"K*: {fmt(k.value)}{w}")
    lines.append(f"method: {r.method}")
    return "\n".join(lines) + "\n"


def _correlation_csv(r):
    rows = [(k, fmt(v)) for k, v in enumerate(r.vg_values)]
    return _csv(("kappa", "vg"), rows)


def _eq_text(r):
    verdict = "strict equilibrium" if r.is_strict else ("equilibrium" if r.is_equilibrium else "not an equilibrium")
    label = r.profile.label()
    if r.profile.is_symmetric and isinstance(r.profile.alpha, Fraction) and r.profile.alpha.denominator > _LONG:
        label = f"alpha={show(r.profile.alpha)}"
    lines = [f"{label} at lambda={fmt(r.lam)}: {verdict}"]
    for i, s, g in r.rows():
        lines.append(f"  voter {i}  sigma={show(s)}  Pi={signed(g)}")
    lines.append(f"  margin {signed(r.margin)}")
    if r.note:
        lines.append(f"  note: {r.note}")
    return "\n".join(lines) + "\n"


def _eq_csv(r):
    return _csv(("voter", "sigma", "pi", "margin"),
                [(i, fmt(s), fmt(g), fmt(r.margin)) for i, s, g in r.rows()])


def _pure_text(e):
    tag = "strict" if e.is_strict else ("weak" if e.is_equilibrium else "no")
    gaps = " ".join(signed(g) for g in e.gaps)
    return f"{e.profile.label()}  {tag}  P(p* wins)={fmt(e.p_star_win)}  Pi: {gaps}\n"


def _outcome_text(o):
    if o.method == "exact":
        head = f"P(p* wins) = {fmt(o.p_star_win_prob)} (exact)"
    else:
        head = (f"P(p* wins) = {fmt(o.p_star_win_prob)} ± {fmt(o.ci_halfwidth)} "
                f"(monte_carlo, {o.trials} trials, seed {o.seed})")
    lines = [head]
    for k in sorted(o.vote_count_dist):
        lines.append(f"  votes for p* = {k}: {fmt(o.vote_count_dist[k])}")
    return "\n".join(lines) + "\n"


def _outcome_csv(o):
    return _csv(("votes", "prob"), [(k, fmt(o.vote_count_dist[k])) for k in sorted(o.vote_count_dist)])


def sweep_csv(t):
    return _csv(t.header, [(_cell(r.param), r.profile, _cell(r.pi_min_margin), fmt(bool(r.is_equilibrium)),
                            _cell(r.p_star_win)) for r in t.rows])


def _sweep_text(t):
    out = sweep_csv(t)
    if t.bound is not None:
        out += f"# lambda bound {fmt(t.bound)}\n"
    if t.first_n is not None:
        out += f"# sigma^0 first verified at n={t.first_n}\n"
    return out


_TEXT = {
    CorrelationReport: _correlation_text,
    EquilibriumResult: _eq_text,
    PureEquilibrium: _pure_text,
    OutcomeDistribution: _outcome_text,
    SweepTable: _sweep_text,
}
_CSV = {
    CorrelationReport: _correlation_csv,
    EquilibriumResult: _eq_csv,
    OutcomeDistribution: _outcome_csv,
    SweepTable: sweep_csv,
}


def render(report, format=TEXT):
    if format == MACHINE:
        return dumps(report)
    table = _TEXT if format == TEXT else _CSV if format == CSV else None
    if table is None:
        raise ValueError(f"unknown format {format!r}")
    if isinstance(report, (list, tuple)):
        items = list(report)
        if format == CSV and items and isinstance(items[0], EquilibriumResult):
            head, *rest = [render(x, CSV) for x in items]
            return head + "".join(r.split("\n", 1)[1] for r in rest)
        return "".join(render(x, format) for x in items)
    if isinstance(report, str):
        return report
    fn = table.get(type(report))
    if fn is None:
        if format == CSV:
            raise ValueError(f"no CSV form for {type(report).__name__}")
        return dumps(report)
    return fn(report)


def emit(report, format=TEXT):
    return render(report, format).encode("utf-8")
