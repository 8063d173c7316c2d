# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: modified Gram-Schmidt sweep and the residual march.

Both mirror the signatures in ``_fallback``; see that module for the
contracts.  Kept to plain C loops so the only build dependency is a C
compiler.
"""

from libc.math cimport fabs, sqrt

import numpy as np


def mgs_sweep(double[::1, :] V, double[::1] w, Py_ssize_t k, double[::1] h):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i, j
    cdef double c, s
    for i in range(k):
        c = 0.0
        for j in range(n):
            c += V[j, i] * w[j]
        h[i] = c
        for j in range(n):
            w[j] -= c * V[j, i]
    s = 0.0
    for j in range(n):
        s += w[j] * w[j]
    return sqrt(s)


def residual_march(double[:, ::1] E, double[::1] u, double scale,
                   double tol, long n_t):
    cdef Py_ssize_t k = u.shape[0]
    cdef Py_ssize_t r, c
    cdef long i
    cdef double acc, last
    buf = np.empty(k, dtype=np.float64)
    cdef double[::1] nxt = buf
    for i in range(1, n_t + 1):
        for r in range(k):
            acc = 0.0
            for c in range(k):
                acc += E[r, c] * u[c]
            nxt[r] = acc
        last = nxt[k - 1]
        if fabs(scale * last) > tol:
            return i
        for r in range(k):
            u[r] = nxt[r]
    return n_t + 1
