"""Matplotlib renderings of the CSV reports.

Figures are written next to the CSV they were produced from. The CSV is the
contract; these are conveniences.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0

STYLE = {
    "axes.labelsize": 12,
    "axes.titlesize": 12,
    "xtick.labelsize": 10,
    "ytick.labelsize": 10,
    "legend.fontsize": 10,
    "lines.linewidth": 1.5,
    "savefig.dpi": 150,
}

_LINESTYLES = ["-", "--", ":", "-."]


def _tex_number(x):
    if x > 0 and math.log10(x).is_integer() and x >= 1e3:
        return rf"10^{{{int(math.log10(x))}}}"
    return f"{x:g}"


def figure(width=6.0, height=None):
    height = height or width * GOLDEN
    fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def plot_dressed_curves(curves, path, title=None):
    """Delta E(g) / delta_e against g, one line per method."""
    with plt.rc_context(STYLE):
        fig, ax = figure()
        for i, curve in enumerate(curves):
            ax.plot(curve.g_grid, curve.ratio, _LINESTYLES[i % len(_LINESTYLES)], label=curve.method)
        ax.set_xlabel(r"$g = U\sqrt{n}/\Delta E$")
        ax.set_ylabel(r"$\Delta E(g)/\Delta E$")
        exact = [c for c in curves if c.method in ("quadrature", "operator", "wkb")]
        if exact and len(exact) < len(curves):
            # truncated series run away at large g; keep the axes on the full curves
            top = max(float(np.max(c.ratio)) for c in exact)
            ax.set_ylim(0.95, 1.05 * top)
        if curves:
            c = curves[0]
            ax.set_title(title or rf"$\Delta E = {c.delta_e:g}\,\hbar\omega_0$, $n = {_tex_number(c.n)}$")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_spectrum(eigenvalues, dominant_n, dominant_m, path, title=None):
    """Eigenvalues against the dominant photon number, split by spin projection."""
    eigenvalues = np.asarray(eigenvalues)
    dominant_n = np.asarray(dominant_n)
    dominant_m = np.asarray(dominant_m)
    with plt.rc_context(STYLE):
        fig, ax = figure()
        for m, marker in ((0.5, "^"), (-0.5, "v")):
            sel = dominant_m == m
            ax.plot(dominant_n[sel], eigenvalues[sel], marker, ms=3, ls="none", label=f"m = {m:+g}")
        ax.set_xlabel("dominant photon number")
        ax.set_ylabel(r"$E/\hbar\omega_0$")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_resonances(report, path):
    """Resonance coupling g* against k for each method in a report."""
    with plt.rc_context(STYLE):
        fig, ax = figure()
        methods = []
        for row in report.rows:
            base = row.method.split("(")[0]
            if base not in methods:
                methods.append(base)
        for i, method in enumerate(methods):
            pts = [(r.k, r.g_star) for r in report.rows
                   if r.method.split("(")[0] == method and r.g_star is not None]
            if pts:
                k, g = zip(*pts)
                ax.plot(k, g, "o" + _LINESTYLES[i % len(_LINESTYLES)], ms=4, label=method)
        ax.set_xlabel("k  (resonance at (2k+1) photons)")
        ax.set_ylabel(r"$g^*$")
        ax.set_title(rf"$\Delta E = {report.delta_e:g}\,\hbar\omega_0$, $n = {report.n:g}$")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


_SCRIPT = '''"""Plot {csv_name}; regenerate with: python {script_name}"""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(lambda: ([], []))
with open({csv_name!r}) as fh:
    rows = csv.DictReader(line for line in fh if not line.startswith("#"))
    for row in rows:
        xs, ys = series[row[{group!r}] if {group!r} else ""]
        xs.append(float(row[{x!r}]))
        ys.append(float(row[{y!r}]))

fig, ax = plt.subplots()
for name, (xs, ys) in sorted(series.items()):
    ax.plot(xs, ys, {fmt!r}, label=name or None)
ax.set_xlabel({x!r})
ax.set_ylabel({y!r})
if any(series):
    ax.legend()
fig.savefig({png_name!r})
'''


def write_plot_script(csv_path, x, y, group=None, fmt="-"):
    """Write a standalone matplotlib script that replots ``csv_path``."""
    csv_path = Path(csv_path)
    script = csv_path.with_suffix(".plot.py")
    script.write_text(_SCRIPT.format(
        csv_name=csv_path.name,
        script_name=script.name,
        png_name=csv_path.with_suffix(".script.png").name,
        x=x,
        y=y,
        group=group or "",
        fmt=fmt,
    ))
    return script
