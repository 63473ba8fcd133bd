import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from dressed_rabi import fock
from dressed_rabi.fock import (
    DenseSymmetric,
    TridiagonalSymmetric,
    eigh_dense_symmetric,
    eigh_tridiagonal,
    function_of_position_operator,
    gauss_hermite,
    hermite_function,
    position_operator_matrix,
)


def test_position_operator_small():
    x1 = position_operator_matrix(1)
    np.testing.assert_array_equal(x1.to_dense().entries, [[0, 1], [1, 0]])
    np.testing.assert_allclose(eigh_tridiagonal(x1).eigenvalues, [-1, 1], atol=1e-15)

    x2 = position_operator_matrix(2)
    np.testing.assert_allclose(x2.offdiag, [1, math.sqrt(2)])
    # characteristic polynomial of [[0,1,0],[1,0,r2],[0,r2,0]]: l^3 - 3 l
    roots = np.sort(np.roots([1, 0, -3, 0]).real)
    np.testing.assert_allclose(eigh_tridiagonal(x2).eigenvalues, roots, atol=1e-14)


@pytest.mark.parametrize("n_max", [1, 7, 50])
def test_position_operator_traceless(n_max):
    x = position_operator_matrix(n_max)
    assert np.all(x.diag == 0)
    np.testing.assert_allclose(x.offdiag, np.sqrt(np.arange(1, n_max + 1)))


def test_tridiagonal_trivial_cases():
    assert list(eigh_tridiagonal(TridiagonalSymmetric([0, 0], [1])).eigenvalues) == pytest.approx([-1, 1])
    np.testing.assert_array_equal(eigh_tridiagonal(TridiagonalSymmetric([5, 5, 5], [0, 0])).eigenvalues, [5, 5, 5])


def test_tridiagonal_validation():
    with pytest.raises(ValueError):
        TridiagonalSymmetric([0, 0, 0], [1])
    with pytest.raises(ValueError):
        TridiagonalSymmetric([0, np.inf], [1])


@pytest.mark.parametrize("backend", fock.BACKENDS)
def test_position_spectrum_parity_symmetric(backend):
    spec = eigh_tridiagonal(position_operator_matrix(50), want_vectors=True, backend=backend)
    np.testing.assert_allclose(spec.eigenvalues, -spec.eigenvalues[::-1], atol=1e-10)


@pytest.mark.parametrize("backend", fock.BACKENDS)
def test_spectrum_invariants(backend):
    rng = np.random.default_rng(7)
    t = TridiagonalSymmetric(rng.normal(size=40), rng.normal(size=39))
    spec = eigh_tridiagonal(t, want_vectors=True, backend=backend)
    a = t.to_dense().entries
    v = spec.eigenvectors
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    np.testing.assert_allclose(v.T @ v, np.eye(40), atol=1e-10)
    norm = np.linalg.norm(a, 2)
    residual = np.linalg.norm(a @ v - v * spec.eigenvalues, axis=0)
    assert np.all(residual <= 1e-8 * norm)


def test_tridiagonal_deterministic():
    t = position_operator_matrix(30)
    a = eigh_tridiagonal(t, want_vectors=True)
    b = eigh_tridiagonal(t, want_vectors=True)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_dense_identity():
    np.testing.assert_allclose(eigh_dense_symmetric(DenseSymmetric(np.eye(4))).eigenvalues, [1, 1, 1, 1])


def test_dense_matches_tridiagonal_solver():
    t = position_operator_matrix(20)
    dense = eigh_dense_symmetric(t.to_dense())
    np.testing.assert_allclose(dense.eigenvalues, eigh_tridiagonal(t).eigenvalues, atol=1e-10)


def test_dense_random_trace_and_vectors():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(10, 10))
    a = a + a.T
    spec = eigh_dense_symmetric(DenseSymmetric(a), want_vectors=True)
    assert spec.eigenvalues.sum() == pytest.approx(np.trace(a), abs=1e-10)
    v = spec.eigenvectors
    np.testing.assert_allclose(v.T @ v, np.eye(10), atol=1e-10)
    np.testing.assert_allclose(a @ v, v * spec.eigenvalues, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**32 - 1))
def test_native_and_lapack_agree(order, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(order, order))
    a = DenseSymmetric(a + a.T)
    native = eigh_dense_symmetric(a, backend="native").eigenvalues
    lapack = eigh_dense_symmetric(a, backend="lapack").eigenvalues
    np.testing.assert_allclose(native, lapack, atol=1e-10 * max(1.0, np.abs(lapack).max()))


def test_householder_reproduces_matrix():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(12, 12))
    a = DenseSymmetric(a + a.T)
    t, q = fock.tridiagonalize(a)
    np.testing.assert_allclose(q @ t.to_dense().entries @ q.T, a.entries, atol=1e-12)
    np.testing.assert_allclose(q.T @ q, np.eye(12), atol=1e-13)


def test_dense_symmetrizes_and_rejects_asymmetric():
    a = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
    m = DenseSymmetric(a)
    np.testing.assert_array_equal(m.entries, m.entries.T)
    with pytest.raises(ValueError):
        DenseSymmetric([[1.0, 2.0], [0.0, 1.0]])


def test_eigensolver_reports_nonconvergence(monkeypatch):
    monkeypatch.setattr(fock._kernels, "tql_implicit", lambda d, e, z: 3)
    with pytest.raises(fock.EigensolverError, match="did not converge"):
        eigh_tridiagonal(position_operator_matrix(4))


def test_hermite_function_values():
    assert hermite_function(0, [0.0])[0] == pytest.approx(math.pi ** -0.25, rel=1e-15)
    assert hermite_function(0, [0.0])[0] == pytest.approx(0.7511255, abs=1e-7)
    assert hermite_function(1, [0.0])[0] == 0.0


def test_hermite_orthonormal_by_quadrature():
    def overlap(a, b):
        f = lambda x: hermite_function(a, [x])[0] * hermite_function(b, [x])[0]
        return quad(f, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)[0]

    assert overlap(7, 9) == pytest.approx(0.0, abs=1e-10)
    assert overlap(7, 7) == pytest.approx(1.0, abs=1e-10)


def test_hermite_matches_closed_form():
    from scipy.special import eval_hermite
    x = np.linspace(-6, 6, 41)
    for n in (2, 5, 12):
        ref = eval_hermite(n, x) * np.exp(-x * x / 2) / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
        np.testing.assert_allclose(hermite_function(n, x), ref, rtol=1e-12, atol=1e-15)


def test_hermite_large_degree_finite():
    n = 100_000
    edge = math.sqrt(2 * n + 1)
    x = np.array([0.0, 0.5 * edge, edge, edge + 20.0])
    vals = hermite_function(n, x)
    assert np.all(np.isfinite(vals))
    # phi_n(0)^2 = C(n, n/2) / (2^n sqrt(pi)) for even n
    log_sq = math.lgamma(n + 1) - 2 * math.lgamma(n // 2 + 1) - n * math.log(2) - 0.5 * math.log(math.pi)
    assert abs(vals[0]) == pytest.approx(math.exp(0.5 * log_sq), rel=1e-9)
    assert vals[3] == pytest.approx(0.0, abs=1e-30)


def test_gauss_hermite_order_two():
    nodes, weights = gauss_hermite(2)
    np.testing.assert_allclose(nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    np.testing.assert_allclose(weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)
    assert nodes[1] == pytest.approx(0.7071068, abs=1e-7)
    assert weights[0] == pytest.approx(0.8862269, abs=1e-7)


def test_gauss_hermite_moments():
    nodes, weights = gauss_hermite(20)
    assert weights.sum() == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    assert np.sum(weights * nodes**4) == pytest.approx(0.75 * math.sqrt(math.pi), abs=1e-12)
    # exact through degree 2*order - 1 = 39; x^38 moment is Gamma(39/2)
    assert np.sum(weights * nodes**38) == pytest.approx(math.gamma(19.5), rel=1e-10)


def test_scaled_weights_match_golub_welsch():
    nodes, weights = gauss_hermite(40)
    snodes, scaled = fock.scaled_gauss_hermite(40)
    np.testing.assert_allclose(snodes, nodes, atol=1e-13)
    np.testing.assert_allclose(scaled * np.exp(-snodes**2), weights, rtol=1e-10)


def test_function_identity_and_square():
    n_max = 15
    ident = function_of_position_operator(lambda x: x, n_max)
    np.testing.assert_allclose(ident.entries, position_operator_matrix(n_max).to_dense().entries, atol=1e-10)
    sq = function_of_position_operator(lambda x: x * x, n_max)
    # the last diagonal entry sees the cutoff
    np.testing.assert_allclose(np.diag(sq.entries)[:-1], 2 * np.arange(n_max) + 1, atol=1e-10)


def test_function_sqrt_matches_quadrature_oracle():
    f = function_of_position_operator(lambda x: np.sqrt(1 + x * x), 60)
    # X = sqrt(2) y, phi_0(y)^2 = exp(-y^2) / sqrt(pi)
    ref = quad(lambda y: math.sqrt(1 + 2 * y * y) * math.exp(-y * y) / math.sqrt(math.pi),
               -12, 12, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    assert f.entries[0, 0] == pytest.approx(ref, abs=1e-8)


def test_function_commutes_with_position():
    n_max = 40
    f = function_of_position_operator(lambda x: np.sqrt(4 + 3 * x * x), n_max).entries
    x = position_operator_matrix(n_max).to_dense().entries
    assert np.abs(f @ x - x @ f).max() <= 1e-8 * np.linalg.norm(f, 2)


def test_even_function_parity():
    f = function_of_position_operator(lambda x: np.sqrt(1 + 0.3 * x * x), 50).entries
    n = np.arange(51)
    odd = (n[:, None] - n[None, :]) % 2 == 1
    assert np.abs(f[odd]).max() <= 1e-10


def test_fock_moments():
    n_max = 200
    x = position_operator_matrix(n_max).to_dense().entries
    x2 = x @ x
    x4 = x2 @ x2
    n = np.arange(n_max - 2)
    np.testing.assert_allclose(np.diag(x2)[: n_max - 2], 2 * n + 1, rtol=1e-15)
    np.testing.assert_allclose(np.diag(x4)[: n_max - 2], 6 * n**2 + 6 * n + 3, rtol=1e-14)


def test_fock_moments_exact():
    # <n|X^4|n> = sum_j (X^2)_{nj}^2, and every squared entry of X^2 is an
    # integer built from the squared off-diagonals k + 1 of X
    sq = lambda k: k + 1  # (X_{k,k+1})^2
    for n in range(200):
        diag = sq(n) + (sq(n - 1) if n > 0 else 0)
        up = sq(n) * sq(n + 1)
        down = sq(n - 1) * sq(n - 2) if n > 1 else 0
        assert diag == 2 * n + 1
        assert diag * diag + up + down == 6 * n * n + 6 * n + 3


@pytest.mark.parametrize("n", [0, 1, 5, 20, 50])
def test_truncation_convergence(n):
    # dressed-gap integrand sqrt(1 + 4 g^2 X^2 / n); at strong coupling and
    # small n the floor 4n + 64 is not enough and the default cutoff is needed
    for g, cutoff in ((0.5, 4 * n + 64), (1.0, fock.default_n_max(n))):
        c = 4 * g * g / max(n, 1)
        f = lambda x: np.sqrt(1 + c * x * x)
        a = function_of_position_operator(f, cutoff).entries[n, n]
        b = function_of_position_operator(f, 2 * cutoff).entries[n, n]
        assert abs(a - b) <= 1e-8 * abs(b)


def test_matrix_text_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    a = rng.normal(size=(6, 6))
    m = DenseSymmetric(a + a.T)
    path = tmp_path / "m.txt"
    fock.write_matrix(path, m)
    lines = path.read_text().splitlines()
    assert len(lines) == 6 and all(len(line.split()) == 6 for line in lines)
    np.testing.assert_array_equal(fock.read_matrix(path), m.entries)
