"""Calibration and efficiency figures rendered with matplotlib to SVG.

Output is reproducible: the SVG hash salt is fixed and no creation date is
embedded, so the same CSV always gives the same files.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .calibration import accepted_steps, summarize_scaling  # noqa: E402
from .proposals import METHODS  # noqa: E402

__all__ = ["calibration_figure", "overlay_figure", "efficiency_figure", "write_figures"]

STYLE = {
    "svg.hashsalt": "lrpslab",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": (5.5, 4.0),
}

# colour / marker per method, roughly following a square=cube, cross=region,
# circle=differential convention
_LOOK = {
    "cube-slice": ("tab:blue", "s"),
    "cube-harm": ("tab:red", "s"),
    "cube-ortho-harm": ("tab:olive", "s"),
    "region-slice": ("tab:green", "x"),
    "region-seq-slice": ("tab:gray", "x"),
    "region-harm": ("tab:purple", "x"),
    "region-ortho-harm": ("black", "x"),
    "de-harm": ("tab:orange", "o"),
    "de1": ("tab:blue", "o"),
    "de-mix": ("tab:cyan", "o"),
}


def _look(method):
    return _LOOK.get(method, ("k", "."))


def _ordered(rows_by_method):
    known = [m for m in METHODS if m in rows_by_method]
    return known + sorted(m for m in rows_by_method if m not in METHODS)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _log2_yaxis(ax):
    ax.set_yscale("log", base=2)
    ax.set_xscale("log")
    ax.set_xlabel("dimension $d$")
    ax.set_ylabel(r"$N_\mathrm{steps}$")


def calibration_figure(method, rows, path):
    """Tested configurations of one method with its accepted curve and k d line."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        acc = accepted_steps(rows)
        accepted_cfg = {(g, n) for g, (d, n, e) in acc.items() if n is not None}
        rej = [(r.d, r.n_steps) for r in rows if (r.geometry, r.n_steps) not in accepted_cfg]
        if rej:
            ax.plot(*zip(*rej), linestyle="none", marker="x", color="tab:red",
                    label="rejected", gid="rejected")
        pts = sorted((d, n) for d, n, e in acc.values() if n is not None)
        if pts:
            ax.plot(*zip(*pts), linestyle="none", marker="s", color=_look(method)[0],
                    label="accepted", gid="accepted")
            curve = {}
            for d, n in pts:
                curve[d] = max(n, curve.get(d, 0))
            ax.plot(list(curve), list(curve.values()), "-", color=_look(method)[0],
                    gid="accepted-curve")
        summary = summarize_scaling(rows, method)
        dims = sorted({r.d for r in rows})
        if summary.k is not None and dims:
            lo, hi = dims[0] / 1.5, dims[-1] * 1.5
            ax.plot([lo, hi], [summary.k * lo, summary.k * hi], ":", color="black",
                    label=f"$N_\\mathrm{{steps}} = {summary.k}\\,d$", gid="scaling-law")
        _log2_yaxis(ax)
        ax.set_title(f"{method}: k = {summary.k_label}")
        ax.legend(loc="upper left")
        fig.tight_layout()
        _save(fig, path)


def overlay_figure(rows_by_method, path):
    """Accepted N_steps(d) curves of all methods on one set of axes."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.5, 4.5))
        for method in _ordered(rows_by_method):
            acc = accepted_steps(rows_by_method[method])
            curve = {}
            capped = {}
            for d, n, e in acc.values():
                if n is None:
                    tried = max(r.n_steps for r in rows_by_method[method] if r.d == d)
                    capped[d] = 2 * tried
                else:
                    curve[d] = max(n, curve.get(d, 0))
            color, marker = _look(method)
            xs = sorted(set(curve) | set(capped))
            ys = [curve.get(d, capped.get(d)) for d in xs]
            if xs:
                ax.plot(xs, ys, marker=marker, color=color, label=method, gid=f"curve-{method}")
        _log2_yaxis(ax)
        ax.set_title("Calibration of all samplers")
        ax.legend(loc="upper left", ncol=2)
        fig.tight_layout()
        _save(fig, path)


def efficiency_figure(rows_by_method, path):
    """Efficiency (1 / evaluations per iteration) of accepted configurations versus d."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.5, 4.5))
        all_d = []
        top = 0.0
        for method in _ordered(rows_by_method):
            acc = accepted_steps(rows_by_method[method])
            pts = sorted((d, 1.0 / e) for d, n, e in acc.values() if n is not None and e > 0)
            if not pts:
                continue
            all_d += [d for d, _ in pts]
            top = max(top, max(eff * d for d, eff in pts))
            color, marker = _look(method)
            ax.plot(*zip(*pts), marker=marker, color=color, label=method, gid=f"eff-{method}")
        if all_d:
            lo, hi = min(all_d) / 1.5, max(all_d) * 1.5
            ax.plot([lo, hi], [top / lo, top / hi], "--", color="0.6", label=r"$\propto 1/d$",
                    gid="inverse-d")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("dimension $d$")
        ax.set_ylabel(r"efficiency $\epsilon$ (evaluations$^{-1}$ per iteration)")
        ax.set_title("Efficiency of calibrated samplers")
        ax.legend(loc="lower left", ncol=2)
        fig.tight_layout()
        _save(fig, path)


def write_figures(rows_by_method, out_dir):
    """Write ``<method>_calibration.svg``, ``all_calibration.svg`` and ``efficiency.svg``."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for method in _ordered(rows_by_method):
        path = os.path.join(out_dir, f"{method}_calibration.svg")
        calibration_figure(method, rows_by_method[method], path)
        written.append(path)
    for name, fn in (("all_calibration.svg", overlay_figure), ("efficiency.svg", efficiency_figure)):
        path = os.path.join(out_dir, name)
        fn(rows_by_method, path)
        written.append(path)
    return written
