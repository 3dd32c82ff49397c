"""Classical Hamilton flow of the monomial symbol and the truncated Wigner evolution.

The Wigner function is transported along classical trajectories: the field at
time t and node alpha is the initial symbol evaluated exactly at the
pre-image alpha(-t), found by integrating the flow backwards. No
interpolation of a sampled initial field is involved.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DivergenceError
from .fock import MonomialParams, require_hermitian
from .phasespace import PhaseGrid, WignerField, inverse_map, overlap, symbol, symbol_at

MAX_STEP = 1e-3
SPEED_SCALE = 0.005
GUARD_FACTOR = 10.0


@dataclass(frozen=True)
class Trajectory:
    start: complex
    end: complex
    duration: float
    steps: int


def hamilton_velocity(params: MonomialParams, alpha):
    """d alpha / dt = -i dW_H / d alpha* for W_H = c (alpha*^m alpha^n + alpha^m alpha*^n)."""
    z = np.asarray(alpha, dtype=np.complex128)
    zc = np.conj(z)
    m, n = params.m, params.n
    v = np.zeros_like(z)
    if m:
        v = v + m * zc ** (m - 1) * z**n
    if n:
        v = v + n * z**m * zc ** (n - 1)
    v = -1j * params.coupling * v
    return complex(v) if v.ndim == 0 else v


def default_steps(params: MonomialParams, alpha0: complex, t: float) -> int:
    """Step count for h_t = min(1e-3, 0.005 / max(1, rate)).

    rate = |velocity(alpha0)| / max(1, |alpha0|) is the local angular rate, so
    far-out nodes of fast flows are not integrated with needlessly tiny steps.
    """
    return int(_backend.step_counts(np.array([alpha0]), params.m, params.n, params.coupling, t, MAX_STEP, SPEED_SCALE)[0])


def flow_points(params: MonomialParams, points, t: float, steps: int | None = None) -> np.ndarray:
    """RK4 endpoints after time t (negative t runs the reversed field).

    Raises DivergenceError listing every start point whose trajectory left
    the guarded disc |alpha| <= 10 (|alpha0| + 1) or became non-finite.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    ends, _, ok = _backend.rk4_flow(
        pts, params.m, params.n, params.coupling, float(t), MAX_STEP, SPEED_SCALE, GUARD_FACTOR, steps
    )
    if not ok.all():
        bad = pts[~ok]
        raise DivergenceError(
            f"{bad.size} trajectories diverged within |t|={abs(t):g} (first start point {bad[0]:.4g})",
            nodes=bad,
        )
    return ends


def flow(params: MonomialParams, alpha0: complex, t: float, steps: int | None = None) -> Trajectory:
    if steps is None:
        steps = default_steps(params, alpha0, t)
    end = flow_points(params, [alpha0], t, steps)[0]
    return Trajectory(complex(alpha0), complex(end), float(t), int(steps))


def trajectory_samples(params: MonomialParams, alpha0: complex, times) -> np.ndarray:
    """Positions at each requested time, integrating segment by segment."""
    times = np.asarray(times, dtype=float)
    out = np.empty(times.size, dtype=np.complex128)
    z, t_prev = complex(alpha0), 0.0
    for i, t in enumerate(times):
        if t != t_prev:
            z = flow(params, z, t - t_prev).end
            t_prev = t
        out[i] = z
    return out


def write_trajectory_csv(path, times, positions) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re_alpha", "im_alpha"])
        for t, z in zip(times, positions):
            w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])


def _check_state(rho0):
    require_hermitian(rho0, 1e-10, "initial state")
    tr = np.trace(rho0).real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"initial state must have unit trace, got {tr:.12g}")


def twa_field(rho0: np.ndarray, grid: PhaseGrid, params: MonomialParams, t: float) -> WignerField:
    """W(alpha | t) = W_rho0(alpha(-t)) on every grid node."""
    _check_state(rho0)
    if t == 0:
        return symbol(rho0, grid)
    pre = flow_points(params, grid.nodes, -t)
    return WignerField(grid, symbol_at(rho0, pre))


def twa_expectation(f: np.ndarray, field_: WignerField) -> float:
    """<f>(t) as the phase-space overlap of the symbol of f with the evolved field."""
    require_hermitian(f, 1e-10, "observable")
    return overlap(symbol(f, field_.grid), field_)


def reconstruct_R(rho0: np.ndarray, grid: PhaseGrid, params: MonomialParams, t: float) -> np.ndarray:
    """R(t) = int d^2 alpha / pi w(alpha) W_rho0(alpha(-t))."""
    return inverse_map(twa_field(rho0, grid, params, t), rho0.shape[0])


def twa_fields(rho0: np.ndarray, grid: PhaseGrid, params: MonomialParams, times):
    """Yield (t, field) for increasing times, reusing the previous pre-images.

    Backward flows compose, alpha(-t2) = Phi_{-(t2-t1)}(alpha(-t1)), so the
    total integration cost grows with max(times) instead of sum(times).
    """
    _check_state(rho0)
    pre = grid.nodes.copy()
    t_prev = 0.0
    for t in times:
        if t < t_prev:
            raise ValueError("times must be non-decreasing")
        if t > t_prev:
            try:
                pre = flow_points(params, pre, -(t - t_prev))
            except DivergenceError as exc:
                mask = np.isin(pre, exc.nodes)
                raise DivergenceError(str(exc), nodes=grid.nodes[mask]) from None
            t_prev = t
        yield t, WignerField(grid, symbol_at(rho0, pre))
