"""Resonance couplings solving Delta E(g) = (2k + 1) omega0.

Roots of the resonance condition for any dressed-gap method, avoided
crossings located in the exact spectrum, and method comparison tables.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from dressed_rabi import dressed
from dressed_rabi.core import ModelParams
from dressed_rabi.fock import StateLabel
from dressed_rabi.hamiltonians import SpinFockBasis, build_full_hamiltonian, sector_spectrum

_G_HI_START = 1.0
_G_HI_MAX = 1024.0
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

REPORT_METHODS = ("wkb", "quadrature", "operator", "series", "ostrovsky", "ahmad_bullough")


class NoResonanceError(ValueError):
    """The requested resonance cannot be reached by increasing the coupling."""


@dataclass(frozen=True)
class ResonanceSolution:
    k: int
    g_star: float
    method: str
    residual: float


@dataclass(frozen=True)
class AnticrossingPoint:
    u_star: float
    gap: float
    pair: tuple[StateLabel, StateLabel]
    sector: int
    # gap at the coarse grid points on either side of the refined minimum
    neighbor_gaps: tuple[float, float] = field(default=(math.inf, math.inf), compare=False)

    def g_star(self, delta_e: float, n: float) -> float:
        return self.u_star * math.sqrt(n) / delta_e


def resonance_coupling(delta_e, n, k: int, method: str = "wkb", omega0: float = 1.0,
                       g_hi: float = _G_HI_START, allow_large_n: bool = False) -> ResonanceSolution:
    """Coupling g* solving Delta E(g*) = (2k + 1) omega0.

    The dressed gap never drops below delta_e, so resonances with
    (2k + 1) omega0 < delta_e are unreachable. For the monotone methods the
    upper bracket is doubled from ``g_hi`` until it closes; the quartic
    expansions are bracketed below their turning point instead.
    """
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k}")
    k = int(k)
    target = (2 * k + 1) * omega0 / delta_e
    if target < 1.0:
        raise NoResonanceError(
            f"(2k+1) omega0 = {(2 * k + 1) * omega0:g} is below delta_e = {delta_e:g}; unreachable"
        )
    label = dressed.method_label(method, k)
    if target == 1.0:
        return ResonanceSolution(k, 0.0, label, 0.0)
    func = dressed.ratio_function(method, n, k, allow_large_n)

    def objective(g):
        return func(g) - target

    if method in dressed.MONOTONE_METHODS:
        hi = g_hi
        while objective(hi) < 0.0:
            hi *= 2.0
            if hi > _G_HI_MAX:
                raise NoResonanceError(f"could not bracket the k={k} resonance below g={_G_HI_MAX:g}")
    else:
        coeffs = dressed.literature_coefficients(method, k)
        hi = coeffs.peak()
        if hi is None:
            hi = g_hi
            while objective(hi) < 0.0:
                hi *= 2.0
                if hi > _G_HI_MAX:
                    raise NoResonanceError(f"could not bracket the k={k} resonance")
        elif objective(hi) < 0.0:
            raise NoResonanceError(
                f"{label} quartic peaks at {coeffs.ratio(hi):.6g} below the target ratio {target:.6g}"
            )
    g_star = brentq(objective, 0.0, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    residual = abs(func(g_star) - target) * delta_e
    if residual >= 1e-10 * delta_e:
        raise dressed.ConvergenceError(f"resonance residual {residual:g} too large at g*={g_star!r}")
    return ResonanceSolution(k, float(g_star), label, float(residual))


def _sector_gaps(params_for_u, n_max, sector, index_pairs):
    basis = SpinFockBasis(n_max)
    spec = sector_spectrum(build_full_hamiltonian(params_for_u, n_max), basis, sector)
    vals = spec.eigenvalues
    return [vals[i + 1] - vals[i] for i in index_pairs], spec


def _golden_minimum(f, lo, hi, rel_width):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_width * abs(0.5 * (a + b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _interior_minima(values):
    return [j for j in range(1, len(values) - 1) if values[j] < values[j - 1] and values[j] <= values[j + 1]]


def anticrossing_scan(delta_e, n_target: int, u_interval, n_points: int, n_max: int,
                      omega0: float = 1.0, rel_width: float = 1e-6) -> list[AnticrossingPoint]:
    """Minimum-gap couplings of avoided crossings involving photon number ``n_target``.

    Within each parity sector the exact spectrum of the original Hamiltonian
    has no true crossings, so adjacent levels keep their sorted index as U
    varies. Pairs of adjacent levels are selected at the lower end of the
    interval: opposite spin projection, dominant photon numbers bracketing
    ``n_target``. Their gaps are scanned on a uniform U grid, interior minima
    are detected and refined by golden-section search.
    """
    if n_max < 4 * n_target + 64:
        raise ValueError(f"n_max={n_max} is below 4 n_target + 64 = {4 * n_target + 64}")
    if n_points < 3:
        raise ValueError("need at least 3 grid points")
    lo, hi = map(float, u_interval)
    if not 0.0 <= lo < hi:
        raise ValueError(f"invalid U interval {u_interval!r}")
    grid = np.linspace(lo, hi, n_points)

    def params(u):
        return ModelParams(delta_e=delta_e, u=float(u), omega0=omega0)

    chosen: dict[int, list[int]] = {}
    start_labels: dict[int, list] = {}
    for sector in (1, -1):
        _, spec = _sector_gaps(params(lo), n_max, sector, [])
        labs = spec.labels
        pairs = []
        for i in range(len(labs) - 1):
            a, b = labs[i], labs[i + 1]
            if a.m == b.m:
                continue
            if min(a.n, b.n) <= n_target <= max(a.n, b.n) and max(a.n, b.n) <= n_max // 4:
                pairs.append(i)
        chosen[sector] = pairs
        start_labels[sector] = labs

    # one diagonalization per grid point and sector, shared by all pairs
    def scan_point(u):
        out = {}
        for sector, pairs in chosen.items():
            if pairs:
                out[sector] = _sector_gaps(params(u), n_max, sector, pairs)[0]
        return out

    samples = dressed.parallel_map(scan_point, grid.tolist())

    found = []
    for sector, pairs in chosen.items():
        for p_idx, i in enumerate(pairs):
            gaps = np.array([s[sector][p_idx] for s in samples])

            def gap_at(u, sector=sector, i=i):
                return _sector_gaps(params(u), n_max, sector, [i])[0][0]

            pair = (start_labels[sector][i], start_labels[sector][i + 1])
            for lo_u, hi_u, neighbors in _split_cells(gap_at, grid, gaps):
                u_star, gap = _golden_minimum(gap_at, lo_u, hi_u, rel_width)
                found.append(AnticrossingPoint(u_star, gap, pair, sector, neighbors))
    found.sort(key=lambda p: (p.u_star, p.sector))
    return found


def _split_cells(gap_at, grid, gaps):
    """Brackets for golden-section search around each coarse minimum.

    Every minimum cell is split once at its two midpoints; a cell hiding two
    minima then yields two brackets.
    """
    out = []
    for j in _interior_minima(gaps):
        mids = (0.5 * (grid[j - 1] + grid[j]), 0.5 * (grid[j] + grid[j + 1]))
        xs = [grid[j - 1], mids[0], grid[j], mids[1], grid[j + 1]]
        ys = [gaps[j - 1], gap_at(mids[0]), gaps[j], gap_at(mids[1]), gaps[j + 1]]
        for s in _interior_minima(ys):
            out.append((xs[s - 1], xs[s + 1], (float(ys[s - 1]), float(ys[s + 1]))))
    return out


def default_scan_interval(delta_e, n_target: int, k: int, omega0: float = 1.0, span: float = 0.5):
    """U interval centered on the variational resonance coupling for ``k``."""
    sol = resonance_coupling(delta_e, n_target, k, "quadrature", omega0)
    u0 = sol.g_star * delta_e / math.sqrt(n_target)
    return (u0 * (1.0 - span), u0 * (1.0 + span))


@dataclass
class ReportRow:
    k: int
    method: str
    g_star: Optional[float]
    residual: Optional[float]
    error: Optional[str] = None


@dataclass
class ResonanceReport:
    delta_e: float
    n: float
    rows: list[ReportRow]

    def ks(self) -> list[int]:
        return sorted({r.k for r in self.rows})

    def lookup(self, k, method) -> Optional[ReportRow]:
        for r in self.rows:
            if r.k == k and r.method == dressed.method_label(method, k):
                return r
        return None

    def pairwise(self) -> list[tuple[int, str, str, float]]:
        """Relative differences |g_a - g_b| / |g_a| for every k and method pair."""
        out = []
        for k in self.ks():
            row_k = [r for r in self.rows if r.k == k and r.g_star is not None]
            for i, a in enumerate(row_k):
                for b in row_k[i + 1:]:
                    if a.g_star == 0.0:
                        rel = 0.0 if b.g_star == 0.0 else math.inf
                    else:
                        rel = abs(a.g_star - b.g_star) / abs(a.g_star)
                    out.append((k, a.method, b.method, rel))
        return out

    def to_csv(self, header_comment: Optional[str] = None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "method", "g_star", "residual"])
        for r in self.rows:
            writer.writerow([r.k, r.method, _fmt(r.g_star, r.error), _fmt(r.residual, r.error)])
        buf.write("\n")
        writer.writerow(["k", "method_a", "method_b", "rel_diff"])
        for k, a, b, rel in self.pairwise():
            writer.writerow([k, a, b, repr(float(rel))])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"delta_e = {self.delta_e:g}, n = {self.n:g}",
                 f"{'k':>4}  {'method':<20} {'g_star':>22} {'residual':>12}"]
        for r in self.rows:
            if r.error:
                lines.append(f"{r.k:>4}  {r.method:<20} {'-':>22} {'-':>12}  ({r.error})")
            else:
                lines.append(f"{r.k:>4}  {r.method:<20} {r.g_star:>22.15g} {r.residual:>12.3g}")
        return "\n".join(lines) + "\n"


def _fmt(value, error):
    if error is not None:
        return f"error: {error}"
    return repr(float(value))


def resonance_report(delta_e, n, k_list: Sequence[int], methods: Sequence[str] = ("wkb",),
                     allow_large_n: bool = False) -> ResonanceReport:
    """Resonance couplings for every (k, method); failures are recorded per cell."""
    order = {m: i for i, m in enumerate(REPORT_METHODS)}
    methods = sorted(dict.fromkeys(methods), key=lambda m: order.get(m, len(order)))
    rows = []
    for k in sorted(k_list):
        for method in methods:
            try:
                sol = resonance_coupling(delta_e, n, k, method, allow_large_n=allow_large_n)
                rows.append(ReportRow(k, sol.method, sol.g_star, sol.residual))
            except (ValueError, RuntimeError) as exc:
                rows.append(ReportRow(k, dressed.method_label(method, k), None, None, str(exc)))
    return ResonanceReport(float(delta_e), float(n), rows)
