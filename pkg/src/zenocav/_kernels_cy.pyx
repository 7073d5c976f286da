# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels (same contracts as ``_kernels_py``)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef double complex dc

cdef extern from "complex.h" nogil:
    dc cexp(dc)


cdef inline void _rhs(dc[:, ::1] h, double lam, dc[:, ::1] r,
                      dc[:, ::1] out) noexcept:
    cdef int a, b, k
    cdef dc acc
    for a in range(4):
        for b in range(4):
            acc = 0
            for k in range(4):
                acc = acc + h[a, k] * r[k, b] - r[a, k] * h[k, b]
            out[a, b] = -1j * acc
    out[3, 3] += 2.0 * lam * r[2, 2]
    for k in range(4):
        out[2, k] -= lam * r[2, k]
        out[k, 2] -= lam * r[k, 2]


def lindblad_rk4(h, double lam, rho, double dt, int nsteps):
    """Fixed-step RK4 for the 4-level master equation (see _kernels_py)."""
    cdef cnp.ndarray[dc, ndim=2] hm = np.ascontiguousarray(h, dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] r = np.array(rho, dtype=complex, order="C")
    cdef cnp.ndarray[dc, ndim=2] k1 = np.empty((4, 4), dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] k2 = np.empty((4, 4), dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] k3 = np.empty((4, 4), dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] k4 = np.empty((4, 4), dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] tmp = np.empty((4, 4), dtype=complex)
    cdef dc[:, ::1] hv = hm, rv = r
    cdef dc[:, ::1] v1 = k1, v2 = k2, v3 = k3, v4 = k4, vt = tmp
    cdef int n, a, b
    for n in range(nsteps):
        _rhs(hv, lam, rv, v1)
        for a in range(4):
            for b in range(4):
                vt[a, b] = rv[a, b] + 0.5 * dt * v1[a, b]
        _rhs(hv, lam, vt, v2)
        for a in range(4):
            for b in range(4):
                vt[a, b] = rv[a, b] + 0.5 * dt * v2[a, b]
        _rhs(hv, lam, vt, v3)
        for a in range(4):
            for b in range(4):
                vt[a, b] = rv[a, b] + dt * v3[a, b]
        _rhs(hv, lam, vt, v4)
        for a in range(4):
            for b in range(4):
                rv[a, b] = rv[a, b] + (dt / 6.0) * (
                    v1[a, b] + 2.0 * v2[a, b] + 2.0 * v3[a, b] + v4[a, b])
    return r


cdef void _deriv(dc[:, ::1] o, dc[:, ::1] kv, double d1, double d2,
                 double w1, double w2, double rabi, double dt, int n,
                 dc tip0, dc tip1, dc* f) noexcept:
    cdef int i, m
    cdef dc acc
    cdef dc conv[2]
    cdef dc tip[2]
    cdef double t = dt * n
    cdef dc cross = cexp(1j * (d1 - d2) * t)
    tip[0] = tip0
    tip[1] = tip1
    if n == 0:
        f[0] = 0
        f[1] = 0
        return
    for i in range(2):
        acc = 0.5 * kv[0, i] * tip[i] + 0.5 * kv[n, i] * o[0, i]
        for m in range(1, n):
            acc = acc + kv[m, i] * o[n - m, i]
        conv[i] = dt * acc
    f[0] = -(rabi * rabi) * (w1 * w1 * conv[0] + w1 * w2 * cross * conv[1])
    f[1] = -(rabi * rabi) * (w2 * w1 * conv[0] / cross + w2 * w2 * conv[1])


def volterra_run(c0, double delta1, double delta2, double lam, double rabi,
                 double r1, double r2, double dt, int nsteps):
    """Trapezoidal predictor-corrector for the memory-kernel amplitude ODE."""
    cdef cnp.ndarray[dc, ndim=2] out = np.empty((nsteps + 1, 2), dtype=complex)
    cdef cnp.ndarray[dc, ndim=2] ker = np.empty((nsteps + 1, 2), dtype=complex)
    cdef dc[:, ::1] o = out, kv = ker
    cdef double norm0, norm
    cdef int n
    cdef dc f_n[2]
    cdef dc f_p[2]
    cdef dc pred[2]

    o[0, 0] = c0[0]
    o[0, 1] = c0[1]
    norm0 = abs(o[0, 0]) ** 2 + abs(o[0, 1]) ** 2
    for n in range(nsteps + 1):
        kv[n, 0] = cexp((1j * delta1 - lam) * (dt * n))
        kv[n, 1] = cexp((1j * delta2 - lam) * (dt * n))

    for n in range(nsteps):
        _deriv(o, kv, delta1, delta2, r1, r2, rabi, dt, n,
               o[n, 0], o[n, 1], f_n)
        pred[0] = o[n, 0] + dt * f_n[0]
        pred[1] = o[n, 1] + dt * f_n[1]
        _deriv(o, kv, delta1, delta2, r1, r2, rabi, dt, n + 1,
               pred[0], pred[1], f_p)
        o[n + 1, 0] = o[n, 0] + 0.5 * dt * (f_n[0] + f_p[0])
        o[n + 1, 1] = o[n, 1] + 0.5 * dt * (f_n[1] + f_p[1])
        norm = abs(o[n + 1, 0]) ** 2 + abs(o[n + 1, 1]) ** 2
        if norm > norm0 + 1e-3:
            raise RuntimeError(
                "volterra integration unstable at step %d (t = %.4g): "
                "qubit norm %.6f > %.6f + 1e-3; reduce dt"
                % (n + 1, dt * (n + 1), norm, norm0))
    return out
