"""Pure numpy implementations of the hot kernels.

Selected at import when the compiled ``_core`` extension is unavailable, or
forced with ``TWAKRAUS_BACKEND=python``. Signatures and results match the
compiled versions (up to floating-point summation order).
"""

import math

import numpy as np

_CHUNK = 2048


def kernel_block(points, dim):
    """Matrix elements of the Weyl kernel 2 D(z) P D(z)^dag on levels < dim.

    Uses the Laguerre closed form, so elements on low levels do not depend on
    the truncation. Returns an array of shape (len(points), dim, dim).
    """
    z = np.ascontiguousarray(points, dtype=np.complex128).ravel()
    npts = z.size
    out = np.empty((npts, dim, dim), dtype=np.complex128)
    x = 4.0 * (z.real**2 + z.imag**2)
    g = 2.0 * np.exp(-0.5 * x).astype(np.complex128)
    two_z = 2.0 * z
    for k in range(dim):
        if k > 0:
            g = g * two_z / math.sqrt(k)
        prev = np.zeros(npts)
        cur = np.ones(npts)
        for m in range(dim - k):
            if m == 1:
                prev, cur = cur, (1.0 + k - x) / math.sqrt(1.0 + k)
            elif m > 1:
                mm = m - 1
                nxt = ((2 * mm + 1 + k - x) * cur - math.sqrt(mm * (mm + k)) * prev) / math.sqrt(
                    (mm + 1) * (mm + 1 + k)
                )
                prev, cur = cur, nxt
            val = g * cur
            if m % 2:
                val = -val
            out[:, m + k, m] = val
            if k:
                out[:, m, m + k] = np.conj(val)
    return out


def symbol_values(f, points):
    """Complex values Tr(f w(z)) at each point (real for Hermitian f)."""
    f = np.ascontiguousarray(f, dtype=np.complex128)
    z = np.ascontiguousarray(points, dtype=np.complex128).ravel()
    dim = f.shape[0]
    out = np.empty(z.size, dtype=np.complex128)
    ft = f.T.ravel()
    for start in range(0, z.size, _CHUNK):
        blk = kernel_block(z[start : start + _CHUNK], dim)
        out[start : start + _CHUNK] = blk.reshape(blk.shape[0], -1) @ ft
    return out


def _velocity(z, m, n, coupling):
    zc = np.conj(z)
    v = np.zeros_like(z)
    if m:
        v = v + m * zc ** (m - 1) * z**n
    if n:
        v = v + n * z**m * zc ** (n - 1)
    return -1j * coupling * v


def step_counts(z0, m, n, coupling, t, h_max, vel_scale):
    rate = np.abs(_velocity(z0, m, n, coupling)) / np.maximum(1.0, np.abs(z0))
    h = np.minimum(h_max, vel_scale / np.maximum(1.0, rate))
    return np.maximum(1, np.ceil(abs(t) / h - 1e-9)).astype(np.int64)


def rk4_flow(z0, m, n, coupling, t, h_max, vel_scale, guard, steps=None):
    """Fixed-step RK4 endpoints for many starting points at once.

    Each point uses its own step count (from its initial speed unless
    ``steps`` is given). Returns (endpoints, steps, ok).
    """
    z0 = np.ascontiguousarray(z0, dtype=np.complex128).ravel()
    if steps is None:
        nsteps = step_counts(z0, m, n, coupling, t, h_max, vel_scale)
    else:
        nsteps = np.full(z0.size, int(steps), dtype=np.int64)
    h = t / nsteps
    z = z0.copy()
    ok = np.ones(z0.size, dtype=bool)
    limit = guard * (np.abs(z0) + 1.0)
    if t == 0:
        return z, nsteps, ok
    for it in range(int(nsteps.max())):
        act = ok & (nsteps > it)
        if not act.any():
            break
        za, ha = z[act], h[act]
        k1 = _velocity(za, m, n, coupling)
        k2 = _velocity(za + 0.5 * ha * k1, m, n, coupling)
        k3 = _velocity(za + 0.5 * ha * k2, m, n, coupling)
        k4 = _velocity(za + ha * k3, m, n, coupling)
        znew = za + (ha / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        bad = ~np.isfinite(znew) | (np.abs(znew) > limit[act])
        z[act] = np.where(bad, za, znew)
        idx = np.flatnonzero(act)
        ok[idx[bad]] = False
    return z, nsteps, ok


def jacobi_eigh(a, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Returns (eigenvalues, eigenvectors as columns, sweeps, final off-norm).
    Eigenvalues come back unsorted.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    sweeps = 0

    offdiag = ~np.eye(n, dtype=bool)

    def off_norm():
        return float(np.linalg.norm(a[offdiag]))

    off = off_norm()
    while off > tol * scale:
        if sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                tt = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + tt * tt)
                s = tt * c
                sp = s * np.conj(phase)
                cp = c * np.conj(phase)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - sp * colq
                a[:, q] = s * colp + cp * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - np.conj(sp) * rowq
                a[q, :] = s * rowp + np.conj(cp) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sp * vq
                v[:, q] = s * vp + cp * vq
        off = off_norm()
    return np.diag(a).real.copy(), v, sweeps, off
