# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Must stay numerically identical in intent to _pykernels."""

import numpy as np
from libc.math cimport fabs


cdef inline double _soft(double a, double v) noexcept nogil:
    if v > a:
        return v - a
    if v < -a:
        return v + a
    return 0.0


cdef double _objective(const double[:, ::1] G, const double[::1] b,
                       const double[::1] mu, double[::1] x, double[::1] Gx) noexcept nogil:
    cdef Py_ssize_t K = G.shape[0], i, j
    cdef double acc, val = 0.0
    for i in range(K):
        acc = 0.0
        for j in range(K):
            acc += G[i, j] * x[j]
        Gx[i] = acc
    for i in range(K):
        val += 0.5 * x[i] * Gx[i] - b[i] * x[i] + mu[i] * fabs(x[i])
    return val


def cd_lasso(const double[:, ::1] G, const double[::1] b, const double[::1] mu,
             const double[::1] x0, double tol, int max_sweeps):
    cdef Py_ssize_t K = G.shape[0], k, j
    cdef double[::1] x = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] Gx = np.empty(K, dtype=np.float64)
    cdef double gkk, r, new, delta, prev, cur
    cdef int sweeps = 0
    cdef bint converged = False

    with nogil:
        cur = _objective(G, b, mu, x, Gx)
        while sweeps < max_sweeps:
            sweeps += 1
            for k in range(K):
                gkk = G[k, k]
                if gkk <= 0.0:
                    # zero row: b_k is zero too, so the minimizer is 0
                    new = 0.0
                else:
                    r = b[k] - Gx[k] + gkk * x[k]
                    new = _soft(mu[k], r) / gkk
                delta = new - x[k]
                if delta != 0.0:
                    x[k] = new
                    for j in range(K):
                        Gx[j] += delta * G[k, j]
            prev = cur
            cur = _objective(G, b, mu, x, Gx)
            if prev - cur <= tol * (1.0 + fabs(cur)):
                converged = True
                break
    return np.asarray(x), sweeps, converged, cur


def exact_linesearch(double quad, double lin, const double[::1] x,
                     const double[::1] d, const double[::1] mu):
    cdef Py_ssize_t K = x.shape[0], k, i, m
    cdef double slope = 0.0, lo = 0.0, hi, dlo, dhi, bp
    cdef double[::1] bps = np.empty(K, dtype=np.float64)
    cdef double[::1] jumps = np.empty(K, dtype=np.float64)

    m = 0
    for k in range(K):
        if d[k] == 0.0:
            continue
        if x[k] == 0.0:
            slope += mu[k] * fabs(d[k])
        elif x[k] > 0.0:
            slope += mu[k] * d[k]
            if d[k] < 0.0:
                bp = -x[k] / d[k]
                if bp < 1.0:
                    bps[m] = bp
                    jumps[m] = 2.0 * mu[k] * fabs(d[k])
                    m += 1
        else:
            slope -= mu[k] * d[k]
            if d[k] > 0.0:
                bp = -x[k] / d[k]
                if bp < 1.0:
                    bps[m] = bp
                    jumps[m] = 2.0 * mu[k] * fabs(d[k])
                    m += 1

    order = np.argsort(np.asarray(bps[:m]), kind="stable")
    cdef Py_ssize_t[::1] idx = order.astype(np.intp)

    for i in range(m + 1):
        hi = bps[idx[i]] if i < m else 1.0
        dlo = quad * lo + lin + slope
        if dlo >= 0.0:
            return lo
        dhi = quad * hi + lin + slope
        if dhi >= 0.0:
            bp = -(lin + slope) / quad
            return min(max(bp, lo), hi)
        if i < m:
            slope += jumps[idx[i]]
            lo = hi
    return 1.0
