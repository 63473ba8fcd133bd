"""Complete elliptic integrals by the arithmetic-geometric mean.

Parameter convention: ``m = k**2``, so E(m) = int_0^{pi/2} sqrt(1 - m sin^2 t) dt.
"""

import math

import numpy as np

_MAX_AGM_STEPS = 60


def _agm_terms(m):
    if not 0.0 <= m < 1.0:
        raise ValueError(f"parameter m must lie in [0, 1), got {m}")
    a, b = 1.0, math.sqrt(1.0 - m)
    # sum of 2^(j-1) c_j^2, with c_0^2 = m
    total = 0.5 * m
    power = 0.5
    for _ in range(_MAX_AGM_STEPS):
        c = 0.5 * (a - b)
        if abs(c) <= 1e-15 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        total += power * c * c
    else:
        raise RuntimeError(f"AGM did not converge for m={m}")
    return a, total


def ellipk(m: float) -> float:
    a, _ = _agm_terms(m)
    return math.pi / (2.0 * a)


def ellipe(m: float) -> float:
    """Complete elliptic integral of the second kind E(m)."""
    if m == 1.0:
        return 1.0
    a, total = _agm_terms(m)
    return math.pi / (2.0 * a) * (1.0 - total)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def ellipe_quadrature(m: float) -> float:
    """E(m) from 64-point Gauss-Legendre on [0, pi/2]; cross-check only."""
    theta = 0.25 * math.pi * (_GL_NODES + 1.0)
    vals = np.sqrt(1.0 - m * np.sin(theta) ** 2)
    return float(0.25 * math.pi * np.dot(_GL_WEIGHTS, vals))
