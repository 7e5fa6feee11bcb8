"""Command line: analyze, equilibria, simulate, sweep, reproduce.

Exit codes: 0 success, 1 validation or assumption failure, 2 numeric
failure, 3 I/O.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import report, reproduce
from .correlation import PreconditionError, classify, elite_adverse
from .equilibrium import (LambdaTooLarge, NotAdverse, construct_good, construct_suspicious,
                          elite_equilibrium, population_solve_symmetric, solve_symmetric, verify)
from .model import (BinaryChoiceSpec, CapExceeded, EliteSpec, ExplicitProblem, PopulationSpec, SpecError,
                    StrategyProfile, realize_core, realize_elite_core, validate_spec)
from .numeric import coerce, fmt, mode_for, to_number
from .oracle import OracleSizeError, enumerate_pure_equilibria
from .scenario import ScenarioError, load, parse
from .simulate import exact_outcome, monte_carlo, sweep

OK, INVALID, NUMERIC, IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are input validation failures, not numeric ones
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _number(text):
    try:
        return to_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _add_format(p, choices=report.FORMATS):
    p.add_argument("--format", choices=choices, default=choices[0])


def build_parser():
    ap = _Parser(prog="zsv", description="Majority elections with asymmetric information.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="correlation class and K*")
    p.add_argument("scenario")
    _add_format(p)

    p = sub.add_parser("equilibria", help="construct, solve and verify equilibria")
    p.add_argument("scenario")
    p.add_argument("--lambda", dest="lam", type=_number)
    p.add_argument("--profile", help="profile name (sigma^0, alpha=1/3, pure:0101, sanguine:2) or JSON file")
    p.add_argument("--symmetric", action="store_true", help="solve for all symmetric equilibria")
    p.add_argument("--brute-force", action="store_true", help="list pure equilibria by enumeration")
    _add_format(p)

    p = sub.add_parser("simulate", help="outcome distribution of a profile")
    p.add_argument("scenario")
    p.add_argument("--lambda", dest="lam", type=_number)
    p.add_argument("--profile", default="sigma^0")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)

    p = sub.add_parser("sweep", help="equilibrium verdicts over a lambda or n grid")
    p.add_argument("scenario")
    p.add_argument("--param", choices=("lambda", "n"), required=True)
    p.add_argument("--from", dest="start", type=_number, required=True)
    p.add_argument("--to", dest="stop", type=_number, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_number)
    p.add_argument("--profile", default="suspicious", choices=("suspicious", "good", "symmetric-root"),
                   help="profile rule applied at each grid point")
    p.add_argument("--output", help="CSV path (default: standard output)")
    p.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")
    _add_format(p, (report.CSV, report.TEXT, report.MACHINE))

    p = sub.add_parser("reproduce", help="table of anchored checks with pass/fail")
    p.add_argument("--output", help="directory for reproduce.csv (and figures with --plot)")
    p.add_argument("--plot", action="store_true")
    _add_format(p, (report.TEXT, report.CSV))
    return ap


# ---------------------------------------------------------------- helpers


def _lam(args, sc):
    lam = args.lam if getattr(args, "lam", None) is not None else sc.lam
    if lam is None:
        raise SpecError("lambda is required (scenario field or --lambda)")
    if not 0 < lam < 1:
        raise SpecError("lambda must lie in (0, 1)")
    return coerce(lam, _mode(sc.n))


def _mode(n):
    try:
        return mode_for(n)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


# isolated indifference events occur in fixed-fraction problems at many n;
# they are reported but do not stop the analysis
_WARN_ONLY = ("strict conditional events",)


def _validate(problem):
    rep = validate_spec(problem)
    hard = [c for c in rep.failures() if c.name not in _WARN_ONLY]
    for c in rep.failures():
        if c.name in _WARN_ONLY:
            sys.stderr.write(f"warning: {c.name}: {c.counterexample}\n")
    if hard:
        msg = "; ".join(f"{c.name}: {c.detail}" for c in hard)
        raise SpecError(f"assumption check failed: {msg}")


def parse_profile(text, n):
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            raw = parse(fh.read())
        probs = raw["probs"] if isinstance(raw, dict) else raw
        return StrategyProfile(tuple(to_number(x) for x in probs))
    t = text.strip()
    if t in ("sigma^0", "sigma0"):
        return StrategyProfile.symmetric(n, Fraction(0))
    if t in ("sigma^1", "sigma1"):
        return StrategyProfile.symmetric(n, Fraction(1))
    if t.startswith("alpha="):
        return StrategyProfile.symmetric(n, to_number(t[6:]))
    if t.startswith("sanguine:"):
        return StrategyProfile.sanguine(n, int(t[9:]))
    if t.startswith("pure:"):
        bits = t[5:]
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise SpecError(f"pure profile needs {n} binary digits")
        return StrategyProfile(tuple(Fraction(int(b)) for b in bits))
    if t.startswith("mixed:"):
        return StrategyProfile(tuple(to_number(x) for x in t[6:].split(";")))
    raise SpecError(f"unknown profile {text!r}")


def _out(text):
    sys.stdout.write(text)


# ---------------------------------------------------------------- verbs


def cmd_analyze(args):
    sc = load(args.scenario)
    p = sc.problem
    _validate(p)
    if isinstance(p, EliteSpec):
        chk = elite_adverse(p)
        if args.format == report.MACHINE:
            _out(report.render({"elite_adverse": chk}, report.MACHINE))
        else:
            _out(f"elite-adverse: {'yes' if chk.holds else 'no'}\n")
            for k, v in chk.conditions.items():
                _out(f"  ({k}) {'ok' if v['ok'] else 'fails'}  "
                     + "  ".join(f"{kk}={fmt(vv)}" for kk, vv in v.items() if kk != "ok") + "\n")
        return OK
    if isinstance(p, PopulationSpec):
        reps = [classify(s) for s in p.specs]
        if args.format == report.TEXT:
            for n, r in zip(p.support, reps):
                _out(f"n={n}: {r.summary()}\n")
        else:
            _out(report.render(reps, args.format))
        return OK
    _out(report.render(classify(p), args.format))
    return OK


def _profiles_for(p, lam):
    out = []
    try:
        out.append(("suspicious", construct_suspicious(p).profile))
    except NotAdverse:
        pass
    try:
        out.append(("good", construct_good(p, lam).profile))
    except LambdaTooLarge as exc:
        sys.stderr.write(f"good construction: {exc} (admissible lambda found: {fmt(exc.max_lambda)})\n")
    return out


def cmd_equilibria(args):
    sc = load(args.scenario)
    p = sc.problem
    lam = _lam(args, sc)
    _validate(p)
    results = []
    if isinstance(p, PopulationSpec):
        for r in population_solve_symmetric(p, lam):
            if r.result is not None:
                results.append(r.result)
    elif args.profile:
        results.append(verify(p, parse_profile(args.profile, p.n), lam))
    elif args.symmetric:
        for r in solve_symmetric(p, lam):
            if r.result is not None:
                results.append(r.result)
    elif isinstance(p, EliteSpec):
        eq = elite_equilibrium(p)
        res = verify(p, eq.profile, lam)
        res.note = f"elite threshold {fmt(eq.lambda_bar.value)}"
        results.append(res)
    else:
        for name, prof in _profiles_for(p, lam):
            res = verify(p, prof, lam)
            res.note = name
            results.append(res)
    listing = []
    if args.brute_force:
        if isinstance(p, PopulationSpec):
            raise SpecError("--brute-force needs a fixed electorate")
        sub = realize_elite_core(p) if isinstance(p, EliteSpec) else (
            realize_core(p) if isinstance(p, BinaryChoiceSpec) else p)
        listing = enumerate_pure_equilibria(sub, lam)
    if args.format == report.MACHINE:
        _out(report.render({"results": results, "brute_force": listing}, report.MACHINE))
    elif args.format == report.CSV:
        _out(report.render(results, report.CSV))
    else:
        _out(report.render(results, report.TEXT))
        if args.brute_force:
            _out(f"pure equilibria by enumeration ({len(listing)}):\n")
            _out(report.render(listing, report.TEXT))
    return OK


def cmd_simulate(args):
    sc = load(args.scenario)
    p = sc.problem
    if isinstance(p, PopulationSpec):
        raise SpecError("simulate needs a fixed electorate")
    lam = _lam(args, sc)
    prof = parse_profile(args.profile, p.n)
    if args.trials:
        out = monte_carlo(p, prof, args.trials, args.seed, lam)
    else:
        out = exact_outcome(p, prof, lam)
    _out(report.render(out, args.format))
    return OK


def _grid(args):
    if args.steps < 1:
        raise SpecError("--steps must be >= 1")
    a, b = args.start, args.stop
    if args.steps == 1:
        pts = [a]
    else:
        pts = [a + (b - a) * k / (args.steps - 1) for k in range(args.steps)]
    if args.param == "n":
        grid = []
        for x in pts:
            k = int(round(x))
            k += 1 - k % 2  # nearest odd size at or above
            if k not in grid:
                grid.append(k)
        return grid
    return pts


def cmd_sweep(args):
    sc = load(args.scenario)
    grid = _grid(args)
    if args.param == "n":
        fam = sc.family()
        if fam is None:
            raise SpecError("n sweeps need winners.fixed_fraction in the scenario")
        table = sweep(fam, "n", grid, args.profile, lam=_lam(args, sc))
    else:
        if not isinstance(sc.problem, BinaryChoiceSpec):
            raise SpecError("sweeps need a binary scenario")
        mode = _mode(sc.n)
        table = sweep(sc.problem, "lambda", [coerce(x, mode) for x in grid], args.profile)
        if sc.family() is not None:
            table.bound = sc.family().bound()
    text = report.render(table, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _out(text)
    if args.plot:
        from .plotting import plot_sweep

        stem = os.path.splitext(args.output)[0] if args.output else f"sweep_{args.param}"
        title = os.path.splitext(os.path.basename(sc.name))[0] or None
        path = plot_sweep(table, stem + ".png", title)
        sys.stderr.write(f"wrote {path}\n")
    return OK


def cmd_reproduce(args):
    rows = reproduce.run()
    text = reproduce.as_csv(rows) if args.format == report.CSV else reproduce.as_text(rows)
    _out(text)
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        with open(os.path.join(args.output, "reproduce.csv"), "w", encoding="utf-8") as fh:
            fh.write(reproduce.as_csv(rows))
    if args.plot:
        outdir = args.output or "."
        for path in reproduce.figures(outdir):
            sys.stderr.write(f"wrote {path}\n")
    return OK if all(r.ok for r in rows) else INVALID


VERBS = {"analyze": cmd_analyze, "equilibria": cmd_equilibria, "simulate": cmd_simulate,
         "sweep": cmd_sweep, "reproduce": cmd_reproduce}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return INVALID
    try:
        return VERBS[args.verb](args)
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return IO
    except (CapExceeded, OracleSizeError, ArithmeticError, LambdaTooLarge) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return NUMERIC
    except (ScenarioError, SpecError, NotAdverse, PreconditionError, KeyError, TypeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
