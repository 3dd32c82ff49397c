# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Weyl kernel elements, batched RK4 flows, Jacobi.

Mirrors ``_fallback`` exactly in signature and semantics.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, fabs, ceil, copysign, isfinite
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)


cdef inline void _kernel_one(cplx z, Py_ssize_t dim, cplx[:, ::1] out) noexcept nogil:
    cdef double x = 4.0 * (z.real * z.real + z.imag * z.imag)
    cdef cplx g = 2.0 * exp(-0.5 * x)
    cdef cplx two_z = 2.0 * z
    cdef double prev, cur, nxt
    cdef Py_ssize_t k, m, mm
    cdef cplx val
    for k in range(dim):
        if k > 0:
            g = g * two_z / sqrt(<double>k)
        prev = 0.0
        cur = 1.0
        for m in range(dim - k):
            if m == 1:
                prev = cur
                cur = (1.0 + k - x) / sqrt(1.0 + k)
            elif m > 1:
                mm = m - 1
                nxt = ((2 * mm + 1 + k - x) * cur - sqrt(<double>(mm * (mm + k))) * prev) / sqrt(
                    <double>((mm + 1) * (mm + 1 + k)))
                prev = cur
                cur = nxt
            val = g * cur
            if m % 2:
                val = -val
            out[m + k, m] = val
            if k:
                out[m, m + k] = conj(val)


def kernel_block(points, Py_ssize_t dim):
    cdef cplx[::1] z = np.ascontiguousarray(points, dtype=np.complex128).ravel()
    cdef Py_ssize_t npts = z.shape[0], i
    res = np.empty((npts, dim, dim), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = res
    with nogil:
        for i in range(npts):
            _kernel_one(z[i], dim, out[i])
    return res


def symbol_values(f, points):
    cdef cplx[:, ::1] fm = np.ascontiguousarray(f, dtype=np.complex128)
    cdef cplx[::1] z = np.ascontiguousarray(points, dtype=np.complex128).ravel()
    cdef Py_ssize_t dim = fm.shape[0], npts = z.shape[0], i, r, s
    res = np.empty(npts, dtype=np.complex128)
    cdef cplx[::1] out = res
    buf = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] w = buf
    cdef cplx acc
    with nogil:
        for i in range(npts):
            _kernel_one(z[i], dim, w)
            acc = 0
            for r in range(dim):
                for s in range(dim):
                    acc = acc + fm[r, s] * w[s, r]
            out[i] = acc
    return res


cdef inline cplx _ipow(cplx base, int e) noexcept nogil:
    cdef cplx r = 1.0
    cdef int j
    for j in range(e):
        r = r * base
    return r


cdef inline cplx _velocity(cplx z, int m, int n, double coupling) noexcept nogil:
    cdef cplx zc = conj(z)
    cdef cplx v = 0
    if m:
        v = v + m * _ipow(zc, m - 1) * _ipow(z, n)
    if n:
        v = v + n * _ipow(z, m) * _ipow(zc, n - 1)
    return -1j * coupling * v


def step_counts(z0, int m, int n, double coupling, double t, double h_max, double vel_scale):
    cdef cplx[::1] z = np.ascontiguousarray(z0, dtype=np.complex128).ravel()
    cdef Py_ssize_t npts = z.shape[0], i
    res = np.empty(npts, dtype=np.int64)
    cdef cnp.int64_t[::1] out = res
    cdef double rate, h, cnt, r
    with nogil:
        for i in range(npts):
            r = cabs(z[i])
            rate = cabs(_velocity(z[i], m, n, coupling)) / (r if r > 1.0 else 1.0)
            h = vel_scale / (rate if rate > 1.0 else 1.0)
            if h > h_max:
                h = h_max
            cnt = ceil(fabs(t) / h - 1e-9)
            out[i] = <cnp.int64_t>(cnt if cnt > 1 else 1)
    return res


def rk4_flow(z0, int m, int n, double coupling, double t, double h_max, double vel_scale,
             double guard, steps=None):
    zin = np.ascontiguousarray(z0, dtype=np.complex128).ravel()
    if steps is None:
        nsteps_arr = step_counts(zin, m, n, coupling, t, h_max, vel_scale)
    else:
        nsteps_arr = np.full(zin.shape[0], int(steps), dtype=np.int64)
    zout_arr = zin.copy()
    ok_arr = np.ones(zin.shape[0], dtype=np.uint8)
    cdef cplx[::1] zs = zout_arr
    cdef cnp.int64_t[::1] ns = nsteps_arr
    cdef cnp.uint8_t[::1] ok = ok_arr
    cdef Py_ssize_t npts = zs.shape[0], i
    cdef cnp.int64_t it
    cdef cplx za, k1, k2, k3, k4, znew
    cdef double h, limit
    if t != 0:
        with nogil:
            for i in range(npts):
                za = zs[i]
                h = t / ns[i]
                limit = guard * (cabs(za) + 1.0)
                for it in range(ns[i]):
                    k1 = _velocity(za, m, n, coupling)
                    k2 = _velocity(za + 0.5 * h * k1, m, n, coupling)
                    k3 = _velocity(za + 0.5 * h * k2, m, n, coupling)
                    k4 = _velocity(za + h * k3, m, n, coupling)
                    znew = za + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                    if not (isfinite(znew.real) and isfinite(znew.imag)) or cabs(znew) > limit:
                        ok[i] = 0
                        break
                    za = znew
                zs[i] = za
    return zout_arr, nsteps_arr, ok_arr.astype(bool)


def jacobi_eigh(a, double tol=1e-12, int max_sweeps=100):
    arr = np.array(a, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] A = arr
    cdef Py_ssize_t n = A.shape[0], p, q, k
    varr = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] V = varr
    cdef double scale = max(1.0, float(np.linalg.norm(arr)))
    cdef int sweeps = 0
    cdef double off, r, app, aqq, tau, tt, c, s
    cdef cplx phase, sp, cp, xp, xq

    off = _off_norm(A, n)
    with nogil:
        while off > tol * scale:
            if sweeps >= max_sweeps:
                break
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = cabs(A[p, q])
                    if r == 0.0:
                        continue
                    phase = A[p, q] / r
                    app = A[p, p].real
                    aqq = A[q, q].real
                    tau = (aqq - app) / (2.0 * r)
                    tt = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + tt * tt)
                    s = tt * c
                    sp = s * conj(phase)
                    cp = c * conj(phase)
                    for k in range(n):
                        xp = A[k, p]
                        xq = A[k, q]
                        A[k, p] = c * xp - sp * xq
                        A[k, q] = s * xp + cp * xq
                    for k in range(n):
                        xp = A[p, k]
                        xq = A[q, k]
                        A[p, k] = c * xp - conj(sp) * xq
                        A[q, k] = s * xp + conj(cp) * xq
                    A[p, q] = 0
                    A[q, p] = 0
                    A[p, p] = A[p, p].real
                    A[q, q] = A[q, q].real
                    for k in range(n):
                        xp = V[k, p]
                        xq = V[k, q]
                        V[k, p] = c * xp - sp * xq
                        V[k, q] = s * xp + cp * xq
            off = _off_norm(A, n)
    return np.diag(arr).real.copy(), varr, sweeps, off


cdef double _off_norm(cplx[:, ::1] A, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0, v
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                v = cabs(A[i, j])
                acc += v * v
    return sqrt(acc)
