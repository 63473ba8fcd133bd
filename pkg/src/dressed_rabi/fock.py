"""Fock-space operators, symmetric eigensolvers, Hermite functions, quadrature.

Two eigensolver backends are available. ``"native"`` is the implicit-shift
QL iteration (preceded by Householder reduction for dense input) compiled
with numba; ``"lapack"`` delegates to scipy/numpy and is the one to use for
dense Hamiltonians beyond a few hundred states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from dressed_rabi import _kernels

BACKENDS = ("native", "lapack")


class EigensolverError(RuntimeError):
    """The QL iteration did not converge within the sweep cap."""


@dataclass(frozen=True)
class TridiagonalSymmetric:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        e = np.array(self.offdiag, dtype=float).reshape(-1)
        if d.size == 0:
            raise ValueError("empty tridiagonal matrix")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag must have length {d.size - 1}, got {e.size}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def order(self) -> int:
        return self.diag.size

    def to_dense(self) -> "DenseSymmetric":
        m = np.diag(self.diag)
        m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return DenseSymmetric(m)


@dataclass(frozen=True)
class DenseSymmetric:
    """Real symmetric matrix, symmetrized on construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        scale = np.max(np.abs(a)) if a.size else 0.0
        if scale > 0 and np.max(np.abs(a - a.T)) > 1e-8 * scale:
            raise ValueError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: "DenseSymmetric") -> "DenseSymmetric":
        return DenseSymmetric(self.entries + other.entries)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2)) if self.order <= 400 else float(
            np.linalg.norm(self.entries, "fro")
        )


@dataclass(frozen=True)
class StateLabel:
    n: int
    m: float
    parity: int


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues, optional eigenvector columns and state labels."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    labels: Optional[Sequence[StateLabel]] = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        if vals.size > 1 and np.any(np.diff(vals) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        if self.eigenvectors is not None and self.eigenvectors.shape[1] != vals.size:
            raise ValueError("eigenvector count does not match eigenvalue count")
        if self.labels is not None and len(self.labels) != vals.size:
            raise ValueError("label count does not match eigenvalue count")

    def __len__(self):
        return self.eigenvalues.size


def _check_backend(backend):
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def _sorted(values, vectors):
    order = np.argsort(values, kind="stable")
    values = values[order]
    if vectors is not None:
        vectors = vectors[:, order]
    return values, vectors


def _ql(diag, offdiag, z):
    d = np.array(diag, dtype=float)
    e = np.zeros_like(d)
    e[:-1] = offdiag
    status = _kernels.tql_implicit(d, e, z)
    if status:
        raise EigensolverError(
            f"QL iteration did not converge for eigenvalue {status - 1} "
            f"within {_kernels.MAX_SWEEPS} sweeps (order {d.size})"
        )
    return d


def eigh_tridiagonal(t: TridiagonalSymmetric, want_vectors=False, backend="native") -> Spectrum:
    """Full spectrum of a symmetric tridiagonal matrix."""
    _check_backend(backend)
    if backend == "lapack":
        if want_vectors:
            vals, vecs = scipy.linalg.eigh_tridiagonal(t.diag, t.offdiag)
        else:
            vals, vecs = scipy.linalg.eigh_tridiagonal(t.diag, t.offdiag, eigvals_only=True), None
        return Spectrum(*_sorted(np.asarray(vals), vecs))
    z = np.eye(t.order) if want_vectors else np.zeros((0, t.order))
    vals = _ql(t.diag, t.offdiag, z)
    return Spectrum(*_sorted(vals, z if want_vectors else None))


def eigh_tridiagonal_rows(t: TridiagonalSymmetric, rows: Sequence[int]):
    """Eigenvalues plus the selected rows of the eigenvector matrix.

    Only the requested components are carried through the QL rotations, so
    the cost stays quadratic in the order. Returns ``(values, components)``
    with ``components[r, j]`` the ``rows[r]`` component of eigenvector ``j``.
    """
    z = np.zeros((len(rows), t.order))
    for r, idx in enumerate(rows):
        z[r, idx] = 1.0
    vals = _ql(t.diag, t.offdiag, z)
    order = np.argsort(vals, kind="stable")
    return vals[order], z[:, order]


def tridiagonalize(a: DenseSymmetric):
    """Householder reduction: returns ``(TridiagonalSymmetric, Q)`` with A = Q T Q^T."""
    work = np.array(a.entries, dtype=float)
    q = np.eye(a.order)
    _kernels.householder_tridiagonalize(work, q)
    return TridiagonalSymmetric(np.diag(work).copy(), np.diag(work, -1).copy()), q


def eigh_dense_symmetric(a: DenseSymmetric, want_vectors=False, backend="native") -> Spectrum:
    """Full spectrum of a dense symmetric matrix.

    The native path reduces to tridiagonal form by Householder reflections
    and finishes with the QL iteration, rotating the accumulated reflector
    matrix into the eigenvectors.
    """
    _check_backend(backend)
    if backend == "lapack":
        if want_vectors:
            vals, vecs = np.linalg.eigh(a.entries)
            return Spectrum(*_sorted(vals, vecs))
        return Spectrum(np.sort(np.linalg.eigvalsh(a.entries)))
    if a.order == 1:
        return Spectrum(a.entries[0].copy(), np.ones((1, 1)) if want_vectors else None)
    t, q = tridiagonalize(a)
    z = np.ascontiguousarray(q) if want_vectors else np.zeros((0, a.order))
    vals = _ql(t.diag, t.offdiag, z)
    return Spectrum(*_sorted(vals, z if want_vectors else None))


def position_operator_matrix(n_max: int) -> TridiagonalSymmetric:
    """Matrix of a + a^dagger on the Fock states |0>..|n_max>."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    return TridiagonalSymmetric(np.zeros(n_max + 1), np.sqrt(np.arange(1, n_max + 1, dtype=float)))


def lowering_operator_matrix(n_max: int) -> np.ndarray:
    """Dense matrix of the annihilation operator, <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _hermite_recurrence(n_values, x):
    """Normalized Hermite functions for each requested degree.

    The Gaussian factor is applied at the end, and the running values are
    rescaled whenever they grow past 1e150 so that large degrees at large
    |x| neither overflow nor lose the Gaussian to underflow.
    """
    x = np.asarray(x, dtype=float)
    wanted = sorted(set(int(k) for k in n_values))
    top = wanted[-1]
    out = {}
    log_scale = np.zeros_like(x)
    prev = np.zeros_like(x)
    cur = np.full_like(x, math.pi ** -0.25)
    sqrt2x = math.sqrt(2.0) * x
    for k in range(top + 1):
        if k in wanted:
            out[k] = (cur, log_scale.copy())
        if k == top:
            break
        nxt = math.sqrt(1.0 / (k + 1)) * sqrt2x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            log_scale = log_scale + np.where(big, _LOG_RESCALE, 0.0)
    half_x2 = 0.5 * x * x
    results = {}
    for k, (vals, logs) in out.items():
        with np.errstate(over="ignore", under="ignore"):
            results[k] = vals * np.exp(logs - half_x2)
    return results


def hermite_function(n: int, points) -> np.ndarray:
    """Orthonormal Hermite function phi_n(x), the position wavefunction of |n>."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return _hermite_recurrence([n], points)[n]


@lru_cache(maxsize=32)
def _jacobi_nodes(order: int) -> np.ndarray:
    # Jacobi matrix of the e^{-x^2} weight: offdiag sqrt(k/2)
    jac = TridiagonalSymmetric(np.zeros(order), np.sqrt(np.arange(1, order) / 2.0))
    nodes = eigh_tridiagonal(jac).eigenvalues
    # symmetric weight: enforce exact antisymmetry of the nodes
    nodes = 0.5 * (nodes - nodes[::-1])
    nodes.flags.writeable = False
    return nodes


def gauss_hermite(order: int):
    """Gauss-Hermite nodes and weights for the weight e^{-x^2} (Golub-Welsch).

    Nodes are the eigenvalues of the Jacobi matrix; weights are sqrt(pi)
    times the squared first components of its normalized eigenvectors.
    """
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if order == 1:
        return np.zeros(1), np.array([math.sqrt(math.pi)])
    jac = TridiagonalSymmetric(np.zeros(order), np.sqrt(np.arange(1, order) / 2.0))
    nodes, first = eigh_tridiagonal_rows(jac, [0])
    weights = math.sqrt(math.pi) * first[0] ** 2
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def scaled_gauss_hermite(order: int):
    """Gauss-Hermite nodes with weights multiplied by e^{x^2}.

    Uses the Christoffel identity w_i e^{x_i^2} = 1 / (order phi_{order-1}(x_i)^2)
    so that tail weights stay finite; suited to integrands written in terms of
    Hermite functions rather than polynomials.
    """
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    nodes = _jacobi_nodes(order)
    phi = hermite_function(order - 1, nodes)
    return nodes, 1.0 / (order * phi * phi)


def function_of_position_operator(
    f: Callable[[np.ndarray], np.ndarray], n_max: int, backend="native"
) -> DenseSymmetric:
    """Dense matrix of f(a + a^dagger) on the truncated Fock space.

    Built as V f(L) V^T from the eigendecomposition of the truncated position
    operator, so it commutes with that truncated operator exactly.
    """
    spec = eigh_tridiagonal(position_operator_matrix(n_max), want_vectors=True, backend=backend)
    vecs = spec.eigenvectors
    fvals = np.asarray(f(spec.eigenvalues), dtype=float)
    if not np.all(np.isfinite(fvals)):
        raise ValueError("f is not finite on the spectrum of the position operator")
    return DenseSymmetric((vecs * fvals) @ vecs.T)


def default_n_max(n: int) -> int:
    """Truncation used for operators evaluated at Fock index ``n``."""
    return max(4 * n + 64, 256)


def write_matrix(path, matrix) -> None:
    """Dump a matrix as plain text, one row per line at full double precision."""
    entries = matrix.entries if isinstance(matrix, DenseSymmetric) else np.asarray(matrix)
    with open(path, "w") as fh:
        for row in entries:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        rows = [[float(tok) for tok in line.split()] for line in fh if line.strip()]
    return np.array(rows)
