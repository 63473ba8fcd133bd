"""Original and rotated-frame Hamiltonians on the truncated spin x Fock basis.

Basis states |n, m> are interleaved as index 2n + (m + 1/2), so m = -1/2
comes first within each photon number. Matrices are Kronecker products
(Fock factor) x (spin factor) in that ordering.

The rotation exp(-i lambda sigma_y) with lambda = -arctan(2 U X / delta_e) / 2
splits the Hamiltonian into

    H0 = sqrt(delta_e^2 + 4 U^2 X^2) s_z + omega0 a^dagger a
    V  = (i omega0 / 2) {A(X), a - a^dagger} sigma_y
    W  = omega0 A(X)^2

with A(x) = (U / delta_e) / (1 + (2 U x / delta_e)^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dressed_rabi.core import ModelParams
from dressed_rabi.fock import (
    DenseSymmetric,
    Spectrum,
    StateLabel,
    eigh_dense_symmetric,
    function_of_position_operator,
    lowering_operator_matrix,
)

SPIN_Z = np.diag([-0.5, 0.5])
SPIN_X2 = np.array([[0.0, 1.0], [1.0, 0.0]])  # 2 s_x / hbar
# sigma_y = i J in the (m=-1/2, m=+1/2) ordering
SPIN_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class SpinFockBasis:
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, n: int, m: float) -> int:
        if not 0 <= n <= self.n_max or m not in (-0.5, 0.5):
            raise ValueError(f"state |{n}, {m}> is outside the basis")
        return 2 * n + int(m + 0.5)

    def state(self, i: int) -> tuple[int, float]:
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return i // 2, (i % 2) - 0.5

    def photon_numbers(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_max + 1), 2)

    def spin_projections(self) -> np.ndarray:
        return np.tile([-0.5, 0.5], self.n_max + 1)


@dataclass(frozen=True)
class RotatedParts:
    h0: DenseSymmetric
    v: DenseSymmetric
    w: DenseSymmetric

    def total(self) -> DenseSymmetric:
        return DenseSymmetric(self.h0.entries + self.v.entries + self.w.entries)


def parity_index(basis: SpinFockBasis) -> np.ndarray:
    """Conserved parity (-1)^n sign(m) of every basis state."""
    n = basis.photon_numbers()
    sign_m = np.sign(basis.spin_projections())
    return np.where(n % 2 == 0, 1, -1) * sign_m.astype(int)


def build_full_hamiltonian(params: ModelParams, n_max: int) -> DenseSymmetric:
    """delta_e s_z + omega0 a^dagger a + U (a + a^dagger) 2 s_x, bandwidth 3."""
    basis = SpinFockBasis(n_max)
    a = lowering_operator_matrix(n_max)
    number = np.diag(np.arange(n_max + 1, dtype=float))
    h = params.delta_e * np.kron(np.eye(n_max + 1), SPIN_Z)
    h += params.omega0 * np.kron(number, np.eye(2))
    h += params.u * np.kron(a + a.T, SPIN_X2)
    assert h.shape == (basis.dim, basis.dim)
    return DenseSymmetric(h)


def _coupling_profile(params):
    ratio = params.u / params.delta_e
    return lambda x: ratio / (1.0 + (2.0 * ratio * x) ** 2)


def build_rotated_parts(params: ModelParams, n_max: int, backend="lapack") -> RotatedParts:
    """H0, V and W of the rotated frame on the truncated basis.

    V is kept real: i (a - a^dagger) and sigma_y = i J are both imaginary, so
    V = -(omega0 / 2) {A, a - a^dagger} (x) J, a real symmetric matrix. W is
    spin independent.
    """
    dim_f = n_max + 1
    de, u, w0 = params.delta_e, params.u, params.omega0
    if u == 0.0:
        dressed = DenseSymmetric(np.diag(np.full(dim_f, de)))
        profile = np.zeros((dim_f, dim_f))
    else:
        dressed = function_of_position_operator(
            lambda x: np.sqrt(de * de + 4.0 * u * u * x * x), n_max, backend=backend
        )
        profile = function_of_position_operator(_coupling_profile(params), n_max, backend=backend).entries
    a = lowering_operator_matrix(n_max)
    momentum_like = a - a.T
    number = np.diag(np.arange(dim_f, dtype=float))

    h0 = np.kron(dressed.entries, SPIN_Z) + w0 * np.kron(number, np.eye(2))
    anti = profile @ momentum_like + momentum_like @ profile
    v = -0.5 * w0 * np.kron(anti, SPIN_J)
    w = w0 * np.kron(profile @ profile, np.eye(2))
    return RotatedParts(DenseSymmetric(h0), DenseSymmetric(v), DenseSymmetric(w))


def label_states(vectors: np.ndarray, basis: SpinFockBasis, rows=None) -> list[StateLabel]:
    """Dominant basis state of each eigenvector column (ties go to the lower index).

    ``rows`` maps the vector components back to basis indices when the
    vectors live on a subset (a parity block) of the basis.
    """
    parity = parity_index(basis)
    dominant = np.argmax(vectors * vectors, axis=0)
    if rows is not None:
        dominant = np.asarray(rows)[dominant]
    labels = []
    for i in dominant:
        n, m = basis.state(int(i))
        labels.append(StateLabel(n, m, int(parity[i])))
    return labels


def spectrum_of(h: DenseSymmetric, basis: SpinFockBasis, backend="lapack") -> Spectrum:
    """Eigen-decomposition of ``h`` with dominant-state and parity labels."""
    if h.order != basis.dim:
        raise ValueError(f"matrix order {h.order} does not match basis dimension {basis.dim}")
    spec = eigh_dense_symmetric(h, want_vectors=True, backend=backend)
    return Spectrum(spec.eigenvalues, spec.eigenvectors, label_states(spec.eigenvectors, basis))


def sector_rows(basis: SpinFockBasis, parity: int) -> np.ndarray:
    return np.flatnonzero(parity_index(basis) == parity)


def sector_spectrum(h: DenseSymmetric, basis: SpinFockBasis, parity: int, backend="lapack") -> Spectrum:
    """Spectrum of the block of ``h`` within one parity sector.

    Only meaningful for matrices that conserve parity (the original
    Hamiltonian). Eigenvectors are expressed on the sector rows.
    """
    rows = sector_rows(basis, parity)
    block = DenseSymmetric(h.entries[np.ix_(rows, rows)])
    spec = eigh_dense_symmetric(block, want_vectors=True, backend=backend)
    return Spectrum(spec.eigenvalues, spec.eigenvectors, label_states(spec.eigenvectors, basis, rows))


def block_spectrum(h: DenseSymmetric, basis: SpinFockBasis, blocks, backend="lapack") -> Spectrum:
    """Merge the spectra of disjoint diagonal blocks given as index arrays.

    Eigenvectors are embedded back into the full basis. The caller is
    responsible for the blocks actually decoupling.
    """
    values, vectors, labels = [], [], []
    for rows in blocks:
        rows = np.asarray(rows)
        block = DenseSymmetric(h.entries[np.ix_(rows, rows)])
        spec = eigh_dense_symmetric(block, want_vectors=True, backend=backend)
        full = np.zeros((basis.dim, rows.size))
        full[rows] = spec.eigenvectors
        values.append(spec.eigenvalues)
        vectors.append(full)
        labels.extend(label_states(spec.eigenvectors, basis, rows))
    values = np.concatenate(values)
    vectors = np.concatenate(vectors, axis=1)
    order = np.argsort(values, kind="stable")
    return Spectrum(values[order], vectors[:, order], [labels[i] for i in order])


def h0_blocks(basis: SpinFockBasis):
    """Index sets on which H0 is block diagonal: spin projection x photon parity."""
    n = basis.photon_numbers()
    m = basis.spin_projections()
    return [np.flatnonzero((m == mm) & (n % 2 == pp)) for mm in (-0.5, 0.5) for pp in (0, 1)]


def operator_matrix(name: str, params: ModelParams, n_max: int) -> DenseSymmetric:
    """One of ``full``, ``h0``, ``v``, ``w`` or ``rotated`` (H0 + V + W)."""
    if name == "full":
        return build_full_hamiltonian(params, n_max)
    parts = build_rotated_parts(params, n_max)
    if name == "rotated":
        return parts.total()
    try:
        return {"h0": parts.h0, "v": parts.v, "w": parts.w}[name]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}") from None
