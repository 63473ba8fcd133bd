"""Compiled kernels for the symmetric eigensolvers.

Status codes are returned instead of raising so that the callers can turn
them into Python exceptions with context.
"""

import math

import numba
import numpy as np

MAX_SWEEPS = 50


@numba.njit(cache=True)
def tql_implicit(d, e, z):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    ``d`` holds the diagonal, ``e`` the off-diagonal padded with a trailing
    zero (same length as ``d``). Each column rotation is also applied to the
    columns of ``z`` (shape ``(rows, n)``): pass the identity for full
    eigenvectors, or a subset of its rows when only some components are
    needed. Returns 0 on success, otherwise ``1 + index`` of the eigenvalue
    that failed to converge within ``MAX_SWEEPS``.
    """
    n = d.shape[0]
    rows = z.shape[0]
    eps = np.finfo(np.float64).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == MAX_SWEEPS:
                return 1 + l
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(rows):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


@numba.njit(cache=True)
def householder_tridiagonalize(a, q):
    """Reduce symmetric ``a`` to tridiagonal form in place.

    On return the diagonal and first off-diagonal of ``a`` hold the
    tridiagonal matrix T and ``q`` (initialised to the identity by the caller)
    holds the orthogonal Q with A = Q T Q^T.
    """
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        norm = math.sqrt(np.dot(x, x))
        if norm == 0.0:
            continue
        alpha = -norm if x[0] >= 0.0 else norm
        v = x
        v[0] -= alpha
        vnorm = math.sqrt(np.dot(v, v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        size = n - k - 1
        p = np.zeros(size)
        for i in range(size):
            acc = 0.0
            for j in range(size):
                acc += a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = acc
        kappa = np.dot(v, p)
        w = p - kappa * v
        for i in range(size):
            for j in range(size):
                a[k + 1 + i, k + 1 + j] -= 2.0 * (v[i] * w[j] + w[i] * v[j])
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(size):
                acc += q[i, k + 1 + j] * v[j]
            for j in range(size):
                q[i, k + 1 + j] -= 2.0 * acc * v[j]
    return 0
