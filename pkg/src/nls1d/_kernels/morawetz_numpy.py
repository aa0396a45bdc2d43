"""NumPy fallback for the 4D interaction-quadrature inner loop.

Computes the complex accumulator

    T = sum over grid tuples (x1..x4) of
        sum_j G_j(x) * c(x_j) * prod_{i != j} q(x_i)

with ``q = |u|^2``, ``c = conj(u) * u'``, and ``G = A^T grad a (A x)`` for
the weight ``a(z) = sqrt(z2^2 + z3^2 + z4^2)`` and the fixed orthonormal
rotation A.  Points on the diagonal (z' = 0) contribute zero.

The loop runs over the outermost axis with vectorized 3D blocks; partial
sums are stored per outer index and reduced in a fixed order, so the result
does not depend on execution interleaving.
"""

from __future__ import annotations

import numpy as np


def accumulate(x: np.ndarray, q: np.ndarray, c: np.ndarray) -> complex:
    """Return the complex accumulator T (without the dx^4 weight)."""
    x = np.asarray(x, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    c = np.asarray(c, dtype=np.complex128)
    m = x.size
    if m == 0:
        return 0.0 + 0.0j

    X2 = x[:, None, None]
    X3 = x[None, :, None]
    X4 = x[None, None, :]
    # z-coordinates split into an x1-independent block plus +-x1/2
    B2 = 0.5 * (X2 - X3 - X4)  # z2 = 0.5*x1 + B2
    B3 = 0.5 * (-X2 + X3 - X4)  # z3 = 0.5*x1 + B3
    B4 = 0.5 * (X2 + X3 - X4)  # z4 = -0.5*x1 + B4

    QQQ = q[:, None, None] * q[None, :, None] * q[None, None, :]
    CQQ = c[:, None, None] * q[None, :, None] * q[None, None, :]
    QCQ = q[:, None, None] * c[None, :, None] * q[None, None, :]
    QQC = q[:, None, None] * q[None, :, None] * c[None, None, :]

    partials = np.empty(m, dtype=np.complex128)
    for i1 in range(m):
        h = 0.5 * x[i1]
        Z2 = B2 + h
        Z3 = B3 + h
        Z4 = B4 - h
        R = np.sqrt(Z2**2 + Z3**2 + Z4**2)
        with np.errstate(invalid="ignore", divide="ignore"):
            W2 = np.where(R > 0.0, Z2 / R, 0.0)
            W3 = np.where(R > 0.0, Z3 / R, 0.0)
            W4 = np.where(R > 0.0, Z4 / R, 0.0)
        G1 = 0.5 * (W2 + W3 - W4)
        G2 = 0.5 * (W2 - W3 + W4)
        G3 = 0.5 * (-W2 + W3 + W4)
        G4 = -0.5 * (W2 + W3 + W4)
        partials[i1] = (
            c[i1] * np.sum(G1 * QQQ)
            + q[i1] * (np.sum(G2 * CQQ) + np.sum(G3 * QCQ) + np.sum(G4 * QQC))
        )
    return complex(np.sum(partials))
