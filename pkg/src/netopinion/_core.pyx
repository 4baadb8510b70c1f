# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the hot kernels in _backend_pure.

Arithmetic matches the numpy fallback expression for expression, and the
build disables FMA contraction, so both backends produce bit-identical
trajectories for the same inputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def thomas_shared(const double[::1] dl, const double[::1] d, const double[::1] du,
                  const double[:, ::1] rhs):
    cdef Py_ssize_t m = d.shape[0]
    cdef Py_ssize_t r = rhs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xout = np.empty((r, m))
    cdef double[:, ::1] x = xout
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cp_arr = np.empty(m - 1)
    cdef double[::1] cp = cp_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dn_arr = np.empty(m)
    cdef double[::1] dn = dn_arr
    cdef Py_ssize_t i, k
    cdef double denom

    denom = d[0]
    dn[0] = denom
    for i in range(1, m):
        cp[i - 1] = du[i - 1] / denom
        denom = d[i] - dl[i - 1] * cp[i - 1]
        dn[i] = denom
    for k in range(r):
        x[k, 0] = rhs[k, 0] / dn[0]
        for i in range(1, m):
            x[k, i] = (rhs[k, i] - dl[i - 1] * x[k, i - 1]) / dn[i]
        for i in range(m - 2, -1, -1):
            x[k, i] = x[k, i] - cp[i] * x[k, i + 1]
    return xout


def thomas_rows(const double[:, ::1] dl, const double[:, ::1] d, const double[:, ::1] du,
                const double[:, ::1] rhs):
    cdef Py_ssize_t r = d.shape[0]
    cdef Py_ssize_t m = d.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xout = np.empty((r, m))
    cdef double[:, ::1] x = xout
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cp_arr = np.empty(m - 1)
    cdef double[::1] cp = cp_arr
    cdef Py_ssize_t i, k
    cdef double denom

    for k in range(r):
        denom = d[k, 0]
        x[k, 0] = rhs[k, 0] / denom
        for i in range(1, m):
            cp[i - 1] = du[k, i - 1] / denom
            denom = d[k, i] - dl[k, i - 1] * cp[i - 1]
            x[k, i] = (rhs[k, i] - dl[k, i - 1] * x[k, i - 1]) / denom
        for i in range(m - 2, -1, -1):
            x[k, i] = x[k, i] - cp[i] * x[k, i + 1]
    return xout


def cc_explicit_update(const double[:, ::1] f, const double[:, ::1] lam,
                       const double[:, ::1] delta, const double[:, ::1] chalf,
                       double dt, double dw):
    cdef Py_ssize_t n = lam.shape[0]
    cdef Py_ssize_t ncols = lam.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((n + 1, ncols))
    cdef double[:, ::1] out = out_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] flux_arr = np.empty((n, ncols))
    cdef double[:, ::1] flux = flux_arr
    cdef double coef = dt / dw
    cdef Py_ssize_t i, c

    for i in range(n):
        for c in range(ncols):
            flux[i, c] = (chalf[i, c] / dw) * (
                ((1.0 - delta[i, c]) * lam[i, c] + 1.0) * f[i + 1, c]
                + (delta[i, c] * lam[i, c] - 1.0) * f[i, c]
            )
    for c in range(ncols):
        out[0, c] = f[0, c] + coef * flux[0, c]
        out[n, c] = f[n, c] - coef * flux[n - 1, c]
    for i in range(1, n):
        for c in range(ncols):
            out[i, c] = f[i, c] + coef * (flux[i, c] - flux[i - 1, c])
    return out_arr


def mc_network_update(const cnp.int64_t[::1] c, const double[::1] u_add, const double[::1] u_rem,
                      double dt, double vr, double va, double alpha,
                      double beta, double gamma_n, long c_max):
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t k
    cdef double cf, pa, pr
    cdef double sa = dt * va
    cdef double sr = dt * vr
    cdef double ga = gamma_n + alpha
    cdef double gb = gamma_n + beta
    cdef cnp.int64_t c1

    for k in range(n):
        cf = <double> c[k]
        pa = sa * (cf + alpha) / ga
        pr = sr * (cf + beta) / gb
        c1 = c[k]
        if c1 <= c_max - 1 and u_add[k] < pa:
            c1 += 1
        if c1 >= 1 and u_rem[k] < pr:
            c1 -= 1
        out[k] = c1
    return out_arr


def mc_collision_update(const double[::1] w1, const double[::1] w2, const double[::1] p12,
                        const double[::1] p21, const double[::1] d1, const double[::1] d2,
                        const double[::1] xi1, const double[::1] xi2,
                        const cnp.uint8_t[::1] interact, double eps):
    cdef Py_ssize_t n = w1.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o1_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o2_arr = np.empty(n)
    cdef double[::1] o1 = o1_arr
    cdef double[::1] o2 = o2_arr
    cdef Py_ssize_t k
    cdef double cand1, cand2

    for k in range(n):
        cand1 = w1[k] + (eps * p12[k]) * (w2[k] - w1[k]) + xi1[k] * d1[k]
        cand2 = w2[k] + (eps * p21[k]) * (w1[k] - w2[k]) + xi2[k] * d2[k]
        if interact[k] and cand1 >= -1.0 and cand1 <= 1.0 and cand2 >= -1.0 and cand2 <= 1.0:
            o1[k] = cand1
            o2[k] = cand2
        else:
            o1[k] = w1[k]
            o2[k] = w2[k]
    return o1_arr, o2_arr
