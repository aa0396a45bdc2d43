# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled 4D interaction-quadrature inner loop.

Same contract as morawetz_numpy.accumulate: the fused loop walks all grid
tuples once, skipping the diagonal z' = 0, and accumulates per-outer-index
partial sums that are reduced in a fixed order afterwards (deterministic
for any thread count).
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


def accumulate(x_in, q_in, c_in):
    """Return the complex accumulator T (without the dx^4 weight)."""
    cdef double[::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    c_arr = np.ascontiguousarray(c_in, dtype=np.complex128)
    cdef double[::1] cre = np.ascontiguousarray(c_arr.real)
    cdef double[::1] cim = np.ascontiguousarray(c_arr.imag)
    cdef Py_ssize_t m = x.shape[0]
    if m == 0:
        return 0.0 + 0.0j

    partial_re = np.zeros(m, dtype=np.float64)
    partial_im = np.zeros(m, dtype=np.float64)
    cdef double[::1] pre = partial_re
    cdef double[::1] pim = partial_im

    cdef Py_ssize_t i1, i2, i3, i4
    cdef double x1, x2, x3, x4, q1, q12, q123, q4
    cdef double c1re, c1im
    cdef double t1re, t1im, t2re, t2im, t3re, t3im
    cdef double p2, p3, p4, z2p, z3p, z4p, z2, z3, z4
    cdef double r2, inv, w2, w3, w4, g1, g2, g3, g4, half4
    cdef double acc_re, acc_im, sre, sim

    for i1 in prange(m, nogil=True, schedule="static"):
        x1 = x[i1]
        q1 = q[i1]
        c1re = cre[i1]
        c1im = cim[i1]
        acc_re = 0.0
        acc_im = 0.0
        for i2 in range(m):
            x2 = x[i2]
            q12 = q1 * q[i2]
            p2 = 0.5 * (x1 + x2)
            p3 = 0.5 * (x1 - x2)
            p4 = 0.5 * (x2 - x1)
            for i3 in range(m):
                x3 = x[i3]
                q123 = q12 * q[i3]
                z2p = p2 - 0.5 * x3
                z3p = p3 + 0.5 * x3
                z4p = p4 + 0.5 * x3
                # "replace one q by c" partial products over axes 1..3
                t1re = c1re * q[i2] * q[i3]
                t1im = c1im * q[i2] * q[i3]
                t2re = q1 * cre[i2] * q[i3]
                t2im = q1 * cim[i2] * q[i3]
                t3re = q12 * cre[i3]
                t3im = q12 * cim[i3]
                for i4 in range(m):
                    half4 = 0.5 * x[i4]
                    z2 = z2p - half4
                    z3 = z3p - half4
                    z4 = z4p - half4
                    r2 = z2 * z2 + z3 * z3 + z4 * z4
                    if r2 == 0.0:
                        continue
                    inv = 1.0 / sqrt(r2)
                    w2 = z2 * inv
                    w3 = z3 * inv
                    w4 = z4 * inv
                    g1 = 0.5 * (w2 + w3 - w4)
                    g2 = 0.5 * (w2 - w3 + w4)
                    g3 = 0.5 * (-w2 + w3 + w4)
                    g4 = -0.5 * (w2 + w3 + w4)
                    q4 = q[i4]
                    sre = (g1 * t1re + g2 * t2re + g3 * t3re) * q4 + g4 * q123 * cre[i4]
                    sim = (g1 * t1im + g2 * t2im + g3 * t3im) * q4 + g4 * q123 * cim[i4]
                    acc_re = acc_re + sre
                    acc_im = acc_im + sim
        pre[i1] = acc_re
        pim[i1] = acc_im

    return complex(float(np.sum(partial_re)), float(np.sum(partial_im)))
