"""PNG figures for sweeps and the reproduction run."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden = (math.sqrt(5) - 1) / 2
width = 5.0

style = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 150,
    "savefig.bbox": "tight",
    # keep files byte-stable across runs
    "svg.hashsalt": "zsv",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def _log_margin(x):
    if x is None or x == 0:
        return np.nan
    m = abs(x)
    # exact margins can be far below float range; go through the log of
    # numerator and denominator in that case
    try:
        lg = math.log10(m)
    except (OverflowError, ValueError):
        lg = math.log10(m.numerator) - math.log10(m.denominator)
    return lg


def plot_sweep(table, path, title=None):
    """Win probability and strictness margin across the sweep grid."""
    with plt.rc_context(style):
        fig, (top, bot) = plt.subplots(2, 1, sharex=True, figsize=(width, width * golden * 1.4))
        xs = [float(r.param) for r in table.rows]
        win = [np.nan if r.p_star_win is None else 1 - float(r.p_star_win) for r in table.rows]
        ok = [bool(r.is_equilibrium) for r in table.rows]
        top.plot(xs, win, "-", color="0.4")
        top.plot([x for x, k in zip(xs, ok) if k], [w for w, k in zip(win, ok) if k], "o",
                 color="#2b8cbe", label="equilibrium")
        top.plot([x for x, k in zip(xs, ok) if not k], [w for w, k in zip(win, ok) if not k], "x",
                 color="#d7301f", label="not an equilibrium")
        top.set_ylabel(r"P($p_*$ wins)")
        top.set_ylim(-0.05, 1.05)
        top.legend(frameon=False, loc="best")
        ms = [r.pi_min_margin for r in table.rows]
        lg = [_log_margin(m) for m in ms]
        pos = [m is not None and m > 0 for m in ms]
        bot.plot([x for x, p in zip(xs, pos) if p], [v for v, p in zip(lg, pos) if p], "o", color="#2b8cbe",
                 label="margin > 0")
        bot.plot([x for x, p in zip(xs, pos) if not p], [v for v, p in zip(lg, pos) if not p], "x",
                 color="#d7301f", label="margin ≤ 0")
        bot.set_ylabel(r"$\log_{10}|$margin$|$")
        bot.set_xlabel({"lambda": r"$\lambda$", "n": r"$n$"}.get(table.parameter, table.parameter))
        if table.parameter == "lambda" and table.bound is not None:
            top.axvline(float(table.bound), ls=":", color="0.3")
        if title:
            top.set_title(title)
        return _save(fig, path)


def plot_gap_curve(lams, gaps, path, label, threshold=None):
    """Payoff gap of an uninformed voter as lambda varies."""
    with plt.rc_context(style):
        fig, ax = plt.subplots(figsize=(width, width * golden))
        ax.plot([float(x) for x in lams], [float(g) for g in gaps], "-", color="#08589e", label=label)
        ax.axhline(0, color="0.5", lw=0.8)
        if threshold is not None:
            ax.axvline(float(threshold), ls=":", color="0.3")
            ax.annotate(rf"$\bar\lambda$ = {threshold}", (float(threshold), 0),
                        textcoords="offset points", xytext=(4, 6))
        ax.set_xlabel(r"$\lambda$")
        ax.set_ylabel(r"$\Pi$")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_win_vs_n(ns, wins, path, label):
    with plt.rc_context(style):
        fig, ax = plt.subplots(figsize=(width, width * golden))
        ax.plot(ns, [float(w) for w in wins], "o-", color="#08589e", label=label)
        ax.set_xlabel(r"$n$")
        ax.set_ylabel(r"P($p_*$ wins)")
        ax.legend(frameon=False)
        return _save(fig, path)
