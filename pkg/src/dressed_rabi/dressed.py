"""Dressed two-level energy Delta E(g).

The variational estimate is delta_e * <n| sqrt(1 + 4 g^2 X^2 / n) |n> with
X = a + a^dagger. It is evaluated three ways: Gauss-Hermite quadrature in the
position representation, eigendecomposition of the truncated X, and the
semiclassical (WKB) integral, which reduces to a complete elliptic integral.
Small-g series and the two literature expansions live here too.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from dressed_rabi import fock
from dressed_rabi.core import as_fock_index
from dressed_rabi.elliptic import ellipe

QUADRATURE_MAX_N = 2000
_QUAD_RTOL = 1e-11
_QUAD_MAX_ORDER = 16384
_LANCZOS_MAX_ORDER = 4096

CURVE_METHODS = ("quadrature", "operator", "wkb", "series", "ahmad_bullough", "ostrovsky")
MONOTONE_METHODS = ("quadrature", "operator", "wkb")


class ConvergenceError(RuntimeError):
    """Raised when a truncation or order-doubling check fails."""

    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


def _x2_coefficient(delta_e, g, n, u):
    """Coefficient c in sqrt(1 + c X^2), from either g (n > 0) or U."""
    if delta_e <= 0:
        raise ValueError(f"delta_e must be positive, got {delta_e}")
    if u is not None:
        if u < 0:
            raise ValueError(f"u must be non-negative, got {u}")
        return 4.0 * u * u / (delta_e * delta_e)
    if g is None:
        raise ValueError("give either g or u")
    if g < 0:
        raise ValueError(f"g must be non-negative, got {g}")
    if n == 0:
        raise ValueError("g = U sqrt(n) / delta_e is undefined at n = 0; pass u instead")
    return 4.0 * g * g / n


@lru_cache(maxsize=64)
def _hermite_rule(n, order):
    nodes, scaled = fock.scaled_gauss_hermite(order)
    phi = fock.hermite_function(n, nodes)
    weights = scaled * phi * phi
    # <n|n> = 1 exactly; rescaling removes the rule's 1e-14 normalization error
    weights /= weights.sum()
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=64)
def spectral_gauss_rule(n: int, order: int):
    """Gauss rule for the spectral measure of |n> under X = a + a^dagger.

    Lanczos from the Fock state |n> builds the Jacobi matrix of that measure;
    its eigenvalues are the nodes and the squared first eigenvector
    components the weights, so sum_j w_j p(x_j) = <n|p(X)|n> for polynomials
    of degree < 2 order. Only the Fock window n +/- (order + 1) is reachable,
    which keeps the cost independent of n.
    """
    lo = max(0, n - order - 1)
    fock_numbers = np.arange(lo, n + order + 2)
    off = np.sqrt(fock_numbers[1:].astype(float))
    size = fock_numbers.size

    def apply_x(v):
        out = np.zeros_like(v)
        out[:-1] += off * v[1:]
        out[1:] += off * v[:-1]
        return out

    basis = np.zeros((order, size))
    alpha = np.zeros(order)
    beta = np.zeros(order - 1)
    basis[0, n - lo] = 1.0
    for j in range(order):
        w = apply_x(basis[j])
        alpha[j] = basis[j] @ w
        # full reorthogonalization, twice
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        if j < order - 1:
            beta[j] = np.linalg.norm(w)
            if beta[j] == 0.0:
                raise ConvergenceError(f"Lanczos breakdown at step {j} for n={n}")
            basis[j + 1] = w / beta[j]
    nodes, first = fock.eigh_tridiagonal_rows(fock.TridiagonalSymmetric(alpha, beta), [0])
    weights = first[0] ** 2
    weights /= weights.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _hermite_expectation(n, c, order):
    nodes, weights = _hermite_rule(n, order)
    # X = sqrt(2) x in the position representation
    return float(np.sum(weights * np.sqrt(1.0 + 2.0 * c * nodes * nodes)))


def _spectral_expectation(n, c, order):
    nodes, weights = spectral_gauss_rule(n, order)
    return float(np.sum(weights * np.sqrt(1.0 + c * nodes * nodes)))


def _doubling(evaluate, order, max_order):
    value = evaluate(order)
    while True:
        if 2 * order > max_order:
            raise ConvergenceError(f"quadrature did not converge up to order {order}", coarse=value)
        finer = evaluate(2 * order)
        order *= 2
        if abs(finer - value) <= _QUAD_RTOL * abs(finer):
            return finer
        value = finer


def dressed_gap_quadrature(delta_e, g=None, n=0, *, u=None, order=None, allow_large_n=False) -> float:
    """Variational dressed gap by Gauss quadrature.

    For n <= 2000 the integrand phi_n(x)^2 sqrt(1 + 8 g^2 x^2 / n) is summed
    over Gauss-Hermite nodes with weights that absorb e^{-x^2}. Starting from
    order max(n + 64, 128), the order is doubled until two successive values
    agree to 1e-11 relative; the branch points of the square root sit close
    to the real axis at strong coupling and small n, where the starting order
    alone is not enough.

    Larger n is refused in favour of :func:`dressed_gap_wkb` unless
    ``allow_large_n`` is set, in which case the Gauss rule of the spectral
    measure of |n> (see :func:`spectral_gauss_rule`) is used instead.

    For n = 0 the coupling must be given as ``u`` since g vanishes there.
    """
    n = as_fock_index(n)
    if n > QUADRATURE_MAX_N and not allow_large_n:
        raise ValueError(f"n too large for quadrature (n={n} > {QUADRATURE_MAX_N}); use wkb")
    c = _x2_coefficient(delta_e, g, n, u)
    if c == 0.0:
        return float(delta_e)
    if n > QUADRATURE_MAX_N:
        value = _doubling(lambda k: _spectral_expectation(n, c, k), order or 64, _LANCZOS_MAX_ORDER)
    else:
        if order is not None and order <= n:
            raise ValueError(f"Gauss-Hermite order must exceed n={n}, got {order}")
        value = _doubling(
            lambda k: _hermite_expectation(n, c, k), order or max(n + 64, 128), _QUAD_MAX_ORDER
        )
    return float(delta_e) * value


def dressed_gap_operator(delta_e, g=None, n=0, n_max=None, *, u=None, rtol=1e-8) -> float:
    """Variational dressed gap from the truncated position operator.

    Evaluates sum_j |<n|v_j>|^2 sqrt(1 + c lambda_j^2) over the eigenpairs of
    the truncated X, at ``n_max`` and at ``2 n_max``; the finer value is
    returned once the two agree to ``rtol``.
    """
    n = as_fock_index(n)
    n_max = fock.default_n_max(n) if n_max is None else int(n_max)
    if n_max < 4 * n + 64:
        raise ValueError(f"n_max={n_max} is below the truncation floor 4n + 64 = {4 * n + 64}")
    c = _x2_coefficient(delta_e, g, n, u)
    if c == 0.0:
        return float(delta_e)

    def at(cutoff):
        vals, comps = fock.eigh_tridiagonal_rows(fock.position_operator_matrix(cutoff), [n])
        return float(np.sum(comps[0] ** 2 * np.sqrt(1.0 + c * vals * vals)))

    coarse, fine = at(n_max), at(2 * n_max)
    if abs(fine - coarse) > rtol * abs(fine):
        raise ConvergenceError(
            f"truncation not converged at n_max={n_max}: {coarse!r} vs {fine!r} at {2 * n_max}",
            coarse=delta_e * coarse,
            fine=delta_e * fine,
        )
    return float(delta_e) * fine


def wkb_ratio(g: float, n: float) -> float:
    """Delta E(g) / delta_e in the semiclassical approximation."""
    if n <= 0:
        raise ValueError(f"n must be positive for the WKB form, got {n}")
    if g < 0:
        raise ValueError(f"g must be non-negative, got {g}")
    beta = 8.0 * g * g * (2.0 * n + 1.0) / n
    if beta == 0.0:
        return 1.0
    return 2.0 / math.pi * math.sqrt(1.0 + beta) * ellipe(beta / (1.0 + beta))


def dressed_gap_wkb(delta_e, g, n) -> float:
    """Semiclassical dressed gap.

    (delta_e / pi) * int sqrt((1 + 8 g^2 y^2 / n) / (eps - y^2)) dy over the
    classical region |y| < sqrt(eps), eps = 2n + 1. With y = sqrt(eps) sin t it
    becomes delta_e (2/pi) sqrt(1 + beta) E(beta / (1 + beta)), beta = 8 g^2 eps / n.
    ``n`` need not be an integer.
    """
    return float(delta_e) * wkb_ratio(g, n)


def wkb_ratio_quadrature(g: float, n: float, points: int = 64) -> float:
    """Same integral as :func:`wkb_ratio` by Gauss-Legendre in the angle; a cross-check."""
    beta = 8.0 * g * g * (2.0 * n + 1.0) / n
    x, w = np.polynomial.legendre.leggauss(points)
    theta = 0.5 * math.pi * x
    return float(0.5 * np.dot(w, np.sqrt(1.0 + beta * np.sin(theta) ** 2)))


@dataclass(frozen=True)
class SeriesCoefficients:
    """Delta E(g) / delta_e = 1 + a g^2 + b g^4 + ...

    Coefficients are exact rationals.
    """

    a: Fraction
    b: Fraction
    source: str

    def ratio(self, g: float) -> float:
        g2 = g * g
        return 1.0 + float(self.a) * g2 + float(self.b) * g2 * g2

    def peak(self) -> Optional[float]:
        """Coupling where the quartic stops increasing, or None if it never does."""
        if self.b >= 0:
            return None
        return math.sqrt(float(-self.a / (2 * self.b)))


def variational_coefficients() -> SeriesCoefficients:
    """Large-n series of the variational gap: 1 + 4 g^2 - 12 g^4.

    Follows from <n|X^2|n> = 2n + 1 and <n|X^4|n> = 6n^2 + 6n + 3 in the
    expansion sqrt(1 + y) = 1 + y/2 - y^2/8 with y = 4 g^2 X^2 / n.
    """
    return SeriesCoefficients(Fraction(4), Fraction(-12), "variational")


def variational_coefficients_at(n: int) -> SeriesCoefficients:
    """Finite-n version of the series from the exact X^2 and X^4 moments."""
    n = as_fock_index(n)
    if n == 0:
        raise ValueError("series in g is undefined at n = 0")
    x2 = Fraction(2 * n + 1)
    x4 = Fraction(6 * n * n + 6 * n + 3)
    # sqrt(1 + y), y = 4 g^2 X^2 / n
    a = Fraction(1, 2) * Fraction(4, n) * x2
    b = -Fraction(1, 8) * Fraction(16, n * n) * x4
    return SeriesCoefficients(a, b, f"variational(n={n})")


def ahmad_bullough_coefficients(k: int) -> SeriesCoefficients:
    """a(k) = 4 + 1/(k(k+1)), b(k) = -12 - (8k^4 + 16k^3 + 3k^2 - 5k - 1) / (4 k^3 (k+1)^3)."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k}")
    k = int(k)
    a = 4 + Fraction(1, k * (k + 1))
    b = -12 - Fraction(8 * k**4 + 16 * k**3 + 3 * k**2 - 5 * k - 1, 4 * k**3 * (k + 1) ** 3)
    return SeriesCoefficients(a, b, f"ahmad_bullough({k})")


_Q_PER_G = 4


def ostrovsky_coefficients() -> SeriesCoefficients:
    """1 + q^2/4 - 3 q^4 / 64 rewritten in g with q = 4 g."""
    q2 = Fraction(1, 4)
    q4 = Fraction(-3, 64)
    return SeriesCoefficients(q2 * _Q_PER_G**2, q4 * _Q_PER_G**4, "ostrovsky")


def dressed_gap_series(delta_e, g) -> float:
    """delta_e (1 + 4 g^2 - 12 g^4)."""
    return float(delta_e) * variational_coefficients().ratio(g)


def literature_coefficients(variant: str, k: Optional[int] = None) -> SeriesCoefficients:
    if variant == "ostrovsky":
        return ostrovsky_coefficients()
    if variant == "ahmad_bullough":
        if k is None:
            raise ValueError("ahmad_bullough needs the resonance index k")
        return ahmad_bullough_coefficients(k)
    if variant == "series":
        return variational_coefficients()
    raise ValueError(f"unknown literature variant {variant!r}")


def literature_gap(delta_e, g, variant: str, k: Optional[int] = None) -> float:
    """Dressed gap from the Ahmad-Bullough (needs ``k``) or Ostrovsky-Horsdal quartic."""
    return float(delta_e) * literature_coefficients(variant, k).ratio(g)


def method_label(method: str, k: Optional[int] = None) -> str:
    return f"ahmad_bullough({k})" if method == "ahmad_bullough" else method


def ratio_function(method: str, n, k: Optional[int] = None, allow_large_n=False):
    """Return g -> Delta E(g) / delta_e for ``method`` at photon number ``n``.

    The quadrature and operator ratios do not depend on delta_e, so 1 is used.
    """
    if method == "quadrature":
        as_fock_index(n)
        if n > QUADRATURE_MAX_N and not allow_large_n:
            raise ValueError(f"n too large for quadrature (n={n:g} > {QUADRATURE_MAX_N}); use wkb")
        return lambda g: dressed_gap_quadrature(1.0, g, n, allow_large_n=allow_large_n)
    if method == "operator":
        as_fock_index(n)
        return lambda g: dressed_gap_operator(1.0, g, n)
    if method == "wkb":
        if n <= 0:
            raise ValueError("wkb needs n > 0")
        return lambda g: wkb_ratio(g, n)
    if method in ("series", "ostrovsky", "ahmad_bullough"):
        coeffs = literature_coefficients(method, k)
        return coeffs.ratio
    raise ValueError(f"unknown method {method!r}; choose from {CURVE_METHODS}")


def worker_count() -> int:
    """Thread cap from DRESSED_RABI_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("DRESSED_RABI_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"DRESSED_RABI_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError("DRESSED_RABI_THREADS must be >= 0")
    return value or (os.cpu_count() or 1)


def parallel_map(func, items):
    """Order-preserving map; each item is computed independently."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class DressedCurve:
    g_grid: np.ndarray
    ratio: np.ndarray
    method: str
    n: float
    delta_e: float

    def __post_init__(self):
        g = np.asarray(self.g_grid, dtype=float)
        r = np.asarray(self.ratio, dtype=float)
        if g.shape != r.shape or g.ndim != 1:
            raise ValueError("g_grid and ratio must be 1-d arrays of equal length")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("g_grid must be strictly ascending")
        object.__setattr__(self, "g_grid", g)
        object.__setattr__(self, "ratio", r)

    @property
    def energies(self) -> np.ndarray:
        return self.delta_e * self.ratio

    def to_csv(self, header_comment: Optional[str] = None) -> str:
        return curves_to_csv([self], header_comment)


def curves_to_csv(curves, header_comment: Optional[str] = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["g", "ratio", "method", "n", "delta_e"])
    for curve in curves:
        for g, r in zip(curve.g_grid, curve.ratio):
            writer.writerow([repr(float(g)), repr(float(r)), curve.method, repr(float(curve.n)),
                             repr(float(curve.delta_e))])
    return buf.getvalue()


def read_curves_csv(text: str) -> list[DressedCurve]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    grouped: dict[str, list] = {}
    for row in rows:
        grouped.setdefault(row["method"], []).append(row)
    curves = []
    for method, group in grouped.items():
        curves.append(DressedCurve(
            np.array([float(r["g"]) for r in group]),
            np.array([float(r["ratio"]) for r in group]),
            method,
            float(group[0]["n"]),
            float(group[0]["delta_e"]),
        ))
    return curves


def dressed_curve(
    delta_e, n, g_grid, method: str, k: Optional[int] = None, allow_large_n=False
) -> DressedCurve:
    """Sample Delta E(g) / delta_e on ``g_grid`` with one method.

    ``k`` selects the Ahmad-Bullough resonance index; ``allow_large_n`` lets
    the quadrature method run above n = 2000 (see :func:`dressed_gap_quadrature`).
    """
    if delta_e <= 0:
        raise ValueError(f"delta_e must be positive, got {delta_e}")
    g_grid = np.asarray(g_grid, dtype=float)
    if np.any(g_grid < 0):
        raise ValueError("couplings must be non-negative")
    func = ratio_function(method, n, k, allow_large_n)
    ratio = np.array(parallel_map(func, g_grid.tolist()), dtype=float)
    curve = DressedCurve(g_grid, ratio, method_label(method, k), float(n), float(delta_e))
    if method in MONOTONE_METHODS and ratio.size > 1 and np.any(np.diff(ratio) < -1e-14 * ratio[1:]):
        raise ConvergenceError(f"{method} curve is not non-decreasing in g")
    return curve
