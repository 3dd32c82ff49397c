"""Operator-side TWA evolution: effective Hamiltonian plus signed Lindblad channels.

The generator acts on the reconstructed operator R as

    dR/dt = i (R h_eff - h_eff R) + sum_j w_j (2 L_j R L_j^dag - L_j^dag L_j R - R L_j^dag L_j)

with weights w_j of both signs. For the Kerr and second-harmonic monomials
the channel lists are explicit; any other monomial goes through
``oracle_generator``, which differentiates the phase-space route directly.

Superoperators act on column-stacked operators: vec(R)[r + s*dim] = R[r, s].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .classical import flow_points
from .errors import ConditioningWarning, IndexRangeError, InvalidDimensionError, ShapeMismatchError, StepSizeError
from .fock import (
    HARMONIC,
    KERR,
    SHG,
    MonomialParams,
    anti_normal_product,
    effective_hamiltonian,
    ladder,
    normal_product,
    require_hermitian,
    symmetrized_hamiltonian,
)
from .phasespace import PhaseGrid

TRACE_DRIFT_TOLERANCE = 1e-8
# RK4 stability interval on the imaginary axis is |h lambda| < 2.83
RK4_STABILITY = 2.8
RK4_SCALE = 1e-3


def vec(op: np.ndarray) -> np.ndarray:
    return np.asarray(op).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = math.isqrt(v.size)
    return np.asarray(v).reshape(dim, dim, order="F")


def left_mult(x: np.ndarray) -> np.ndarray:
    """Superoperator of R -> x R."""
    return np.kron(np.eye(x.shape[0]), x)


def right_mult(x: np.ndarray) -> np.ndarray:
    """Superoperator of R -> R x."""
    return np.kron(x.T, np.eye(x.shape[0]))


@dataclass(frozen=True, eq=False)
class LindbladChannel:
    weight: float
    L: np.ndarray = field(repr=False)
    label: str = ""


def channel_apply(ch: LindbladChannel, R: np.ndarray) -> np.ndarray:
    """weight * (2 L R L^dag - L^dag L R - R L^dag L)."""
    if ch.L.shape != R.shape:
        raise ShapeMismatchError(f"channel operator {ch.L.shape} vs R {R.shape}")
    L = ch.L
    Ld = L.conj().T
    LdL = Ld @ L
    return ch.weight * (2.0 * L @ R @ Ld - LdL @ R - R @ LdL)


def build_L_jk(p: int, q: int, j: int, k: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """L = a^dag^j a^k - i a^(p-j) a^dag^(q-k) and its partner with +i.

    The partner is the adjoint of L_kj^(qp). Both are assembled in normal
    order, so their matrix elements are exact on every truncated level.
    """
    if not (0 <= j <= p and 0 <= k <= q):
        raise IndexRangeError(f"need 0 <= j <= p and 0 <= k <= q, got p={p} q={q} j={j} k={k}")
    if max(j, k, p - j, q - k) >= dim:
        raise IndexRangeError(f"powers up to {max(j, k, p - j, q - k)} need dim > that, got dim={dim}")
    first = normal_product(j, k, dim)
    second = anti_normal_product(p - j, q - k, dim)
    return first - 1j * second, first + 1j * second


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Right-hand side of the R equation in channel, F-form or oracle form.

    ``f_form`` holds (coefficient, A, B) triples with F(R) = sum c A R B and
    dissipator i (F(R) - F(R)^dag). ``oracle`` is a full superoperator;
    when present it replaces the other parts in ``rhs``.
    """

    h_eff: np.ndarray = field(repr=False)
    channels: tuple = ()
    f_form: tuple = ()
    oracle: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    @property
    def dim(self) -> int:
        return self.h_eff.shape[0]

    def _drift(self):
        # -i h_eff - sum w L^dag L, cached on first use
        cached = self.__dict__.get("_drift_cache")
        if cached is None:
            q = -1j * self.h_eff
            for ch in self.channels:
                q = q - ch.weight * (ch.L.conj().T @ ch.L)
            cached = q
            object.__setattr__(self, "_drift_cache", cached)
        return cached


def _ch(w, L, label):
    return LindbladChannel(float(w), L, label)


def harmonic_generator(dim: int, coupling: float = 1.0) -> GeneratorSpec:
    """Quadratic Hamiltonians have no dissipator: R evolves unitarily under H_11."""
    h = symmetrized_hamiltonian(MonomialParams(1, 1, coupling), dim)
    return GeneratorSpec(h, (), (), None, "harmonic")


def kerr_generator(dim: int, coupling: float = 1.0) -> GeneratorSpec:
    """h_eff = (a^dag^2 a^2 + a^2 a^dag^2)/2 and four channels of weight 1/4.

    The F-form is F(R) = a R a^dag^2 a + a^dag R a^2 a^dag. This is twice the
    commonly quoted prefactor 1/2, which does not reproduce the channels.
    """
    if dim < 6:
        raise InvalidDimensionError(f"Kerr generator needs dim >= 6, got {dim}")
    L10, L10t = build_L_jk(2, 2, 1, 0, dim)
    L12, L12t = build_L_jk(2, 2, 1, 2, dim)
    w = 0.25 * coupling
    channels = (
        _ch(w, L10, "L10"),
        _ch(w, L12t, "L12~"),
        _ch(-w, L12, "L12"),
        _ch(-w, L10t, "L10~"),
    )
    a, ad = ladder(dim)
    f_form = (
        (coupling, a, normal_product(2, 1, dim)),
        (coupling, ad, anti_normal_product(2, 1, dim)),
    )
    h = effective_hamiltonian(MonomialParams(2, 2, coupling), dim)
    return GeneratorSpec(h, channels, f_form, None, "kerr")


def shg_generator(dim: int, coupling: float = 1.0) -> GeneratorSpec:
    """h_eff = (3/4) H_SG with weight-1/16 and weight-1/8 channel quartets.

    The partner a^dag^2 + i a^dag in the first quartet is L~_20 in the
    (p, q) = (2, 1) indexing (an index label L~_02 would be out of range).
    """
    if dim < 5:
        raise InvalidDimensionError(f"SHG generator needs dim >= 5, got {dim}")
    L01, L01t = build_L_jk(2, 1, 0, 1, dim)
    L20, L20t = build_L_jk(2, 1, 2, 0, dim)
    L10, L10t = build_L_jk(2, 1, 1, 0, dim)
    L11, L11t = build_L_jk(2, 1, 1, 1, dim)
    w1, w2 = coupling / 16.0, coupling / 8.0
    channels = (
        _ch(w1, L01, "L01"),
        _ch(w1, L20t, "L20~"),
        _ch(-w1, L20, "L20"),
        _ch(-w1, L01t, "L01~"),
        _ch(w2, L10, "L10"),
        _ch(w2, L11t, "L11~"),
        _ch(-w2, L11, "L11"),
        _ch(-w2, L10t, "L10~"),
    )
    a, ad = ladder(dim)
    eye = np.eye(dim, dtype=np.complex128)
    ad2a = normal_product(2, 1, dim)
    a2ad = anti_normal_product(2, 1, dim)
    c = coupling / 8.0
    f_form = (
        (2 * c, a, normal_product(2, 0, dim)),
        (2 * c, ad, normal_product(0, 2, dim)),
        (4 * c, a, normal_product(1, 1, dim)),
        (4 * c, ad, anti_normal_product(1, 1, dim)),
        (c, ad2a, eye),
        (c, eye, ad2a),
        (c, a2ad, eye),
        (c, eye, a2ad),
    )
    h = effective_hamiltonian(MonomialParams(1, 2, coupling), dim)
    return GeneratorSpec(h, channels, f_form, None, "shg")


def generator_for(params: MonomialParams, dim: int) -> GeneratorSpec:
    """Explicit generator for the harmonic, Kerr and SHG monomials."""
    key = (params.m, params.n)
    if key == (HARMONIC.m, HARMONIC.n):
        return harmonic_generator(dim, params.coupling)
    if key == (KERR.m, KERR.n):
        return kerr_generator(dim, params.coupling)
    if key == (SHG.m, SHG.n):
        return shg_generator(dim, params.coupling)
    raise ValueError(
        f"no explicit channel list for (m, n) = {key}; use oracle_generator for generic monomials"
    )


def f_form_apply(spec: GeneratorSpec, R: np.ndarray) -> np.ndarray:
    """i (F(R) - F(R)^dag) from the F-form triples."""
    if not spec.f_form:
        raise ValueError(f"generator {spec.label!r} has no F-form")
    F = sum(c * A @ R @ B for c, A, B in spec.f_form)
    return 1j * (F - F.conj().T)


def dissipator(spec: GeneratorSpec, R: np.ndarray) -> np.ndarray:
    """Sum of the signed channel actions."""
    out = np.zeros_like(R, dtype=np.complex128)
    for ch in spec.channels:
        out += channel_apply(ch, R)
    return out


def rhs(spec: GeneratorSpec, R: np.ndarray) -> np.ndarray:
    """i (R h_eff - h_eff R) + sum of channels (or the oracle superoperator)."""
    R = np.asarray(R, dtype=np.complex128)
    if spec.oracle is not None:
        d = math.isqrt(spec.oracle.shape[0])
        if R.shape != (d, d):
            raise ShapeMismatchError(f"oracle acts on {d}x{d}, got {R.shape}")
        return unvec(spec.oracle @ vec(R), d)
    if R.shape != spec.h_eff.shape:
        raise ShapeMismatchError(f"generator acts on {spec.h_eff.shape}, got {R.shape}")
    q = spec._drift()
    out = q @ R + R @ q.conj().T
    for ch in spec.channels:
        out += 2.0 * ch.weight * (ch.L @ R @ ch.L.conj().T)
    return out


def superoperator(spec: GeneratorSpec) -> np.ndarray:
    """Matrix of rhs on column-stacked operators."""
    if spec.oracle is not None:
        return spec.oracle.copy()
    d = spec.dim
    q = spec._drift()
    S = left_mult(q) + right_mult(q.conj().T)
    for ch in spec.channels:
        S += 2.0 * ch.weight * np.kron(ch.L.conj(), ch.L)
    return S


def default_step(spec: GeneratorSpec) -> float:
    """Largest RK4 step, 1e-3 / ||h_eff|| (spectral norm; oracle norm for oracle specs)."""
    if spec.oracle is not None:
        scale = np.linalg.norm(spec.oracle, 2)
    else:
        scale = np.linalg.norm(spec.h_eff, 2)
    return RK4_SCALE / max(scale, 1e-300) if scale > 0 else RK4_SCALE


def rate_bound(spec: GeneratorSpec) -> float:
    """Upper bound on the spectral norm of the generator superoperator."""
    if spec.oracle is not None:
        return float(np.linalg.norm(spec.oracle, 2))
    bound = 2.0 * np.linalg.norm(spec._drift(), 2)
    for ch in spec.channels:
        bound += 2.0 * abs(ch.weight) * np.linalg.norm(ch.L, 2) ** 2
    return float(bound)


def _rk4(spec, R, h, n):
    for _ in range(n):
        k1 = rhs(spec, R)
        k2 = rhs(spec, R + 0.5 * h * k1)
        k3 = rhs(spec, R + 0.5 * h * k2)
        k4 = rhs(spec, R + h * k3)
        R = R + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return R


def evolve_series(spec: GeneratorSpec, R0: np.ndarray, times, max_step: float | None = None) -> list[np.ndarray]:
    """R at each non-decreasing sample time, stepping exactly onto every sample.

    Raises StepSizeError when the step leaves the RK4 stability disc of the
    generator norm bound, or when |Tr R - Tr R0| exceeds 1e-8 at any sample.
    """
    R0 = np.asarray(R0, dtype=np.complex128)
    require_hermitian(R0, 1e-10, "R0")
    tr0 = np.trace(R0).real
    if abs(tr0 - 1.0) > 1e-8:
        raise ValueError(f"R0 must have unit trace, got {tr0:.12g}")
    h_max = default_step(spec) if max_step is None else float(max_step)
    limit = RK4_STABILITY / max(rate_bound(spec), 1e-300)
    if h_max > limit:
        raise StepSizeError(f"step {h_max:.3g} exceeds the RK4 stability limit {limit:.3g}")
    out = []
    R, t_prev = R0.copy(), 0.0
    for t in times:
        t = float(t)
        if t < t_prev:
            raise ValueError("sample times must be non-decreasing from 0")
        if t > t_prev:
            n = max(1, math.ceil((t - t_prev) / h_max - 1e-9))
            R = _rk4(spec, R, (t - t_prev) / n, n)
            R = 0.5 * (R + R.conj().T)
            drift = abs(np.trace(R).real - tr0)
            # the channel form conserves the trace exactly, so drift means blow-up (NaN included)
            if not drift <= TRACE_DRIFT_TOLERANCE or not np.isfinite(R).all():
                raise StepSizeError(f"trace drift {drift:.2e} at t={t:g}; reduce the step")
            t_prev = t
        out.append(R.copy())
    return out


def evolve_R(spec: GeneratorSpec, R0: np.ndarray, t: float, steps: int | None = None) -> np.ndarray:
    """RK4 solution at time t (steps defaults to ceil(t / default_step))."""
    max_step = None if steps is None else abs(t) / max(1, int(steps))
    if t == 0:
        return np.asarray(R0, dtype=np.complex128).copy()
    return evolve_series(spec, R0, [t], max_step=max_step)[-1]


def short_time_R(spec: GeneratorSpec, R0: np.ndarray, t: float) -> np.ndarray:
    """First-order expansion R0 + i t [R0, h_eff] + t L(R0)."""
    R0 = np.asarray(R0, dtype=np.complex128)
    return R0 + t * rhs(spec, R0)


# Kraus form


@dataclass(frozen=True, eq=False)
class KrausOperator:
    sign: int
    K: np.ndarray = field(repr=False)
    label: str = ""


def kraus_operators(spec: GeneratorSpec, delta_t: float, printed: bool = False) -> list[KrausOperator]:
    """Signed Kraus set whose action equals the Euler step to O(delta_t^2).

    K_j = sqrt(2 |w_j| delta_t) L_j carries sign(w_j), and
    K_0 = I - i delta_t h_eff - delta_t sum_j w_j L_j^dag L_j.
    ``printed=True`` builds the variant with prefactor (1/4) sqrt(delta_t)
    and K_0 = I - i delta_t h_eff, kept for the erratum report.
    """
    if spec.oracle is not None:
        raise ValueError("oracle generators have no channel list to build Kraus operators from")
    d = spec.dim
    eye = np.eye(d, dtype=np.complex128)
    if printed:
        k0 = eye - 1j * delta_t * spec.h_eff
        pref = 0.25 * math.sqrt(delta_t)
        ops = [KrausOperator(int(np.sign(ch.weight)), pref * ch.L, ch.label) for ch in spec.channels]
    else:
        k0 = eye + delta_t * spec._drift()
        ops = [
            KrausOperator(int(np.sign(ch.weight)), math.sqrt(2 * abs(ch.weight) * delta_t) * ch.L, ch.label)
            for ch in spec.channels
        ]
    return [KrausOperator(1, k0, "K0")] + ops


def kraus_apply(ops: list[KrausOperator], R: np.ndarray) -> np.ndarray:
    out = np.zeros_like(R, dtype=np.complex128)
    for op in ops:
        out += op.sign * (op.K @ R @ op.K.conj().T)
    return out


def kraus_step(spec: GeneratorSpec, R: np.ndarray, delta_t: float, printed: bool = False) -> np.ndarray:
    """K_0 R K_0^dag + sum_j sign_j K_j R K_j^dag."""
    if delta_t == 0:
        return np.asarray(R, dtype=np.complex128).copy()
    return kraus_apply(kraus_operators(spec, delta_t, printed), np.asarray(R, dtype=np.complex128))


def kraus_completeness(ops: list[KrausOperator], levels: int | None = None, adjoint_first: bool = False) -> float:
    """Frobenius norm of sum sign K K^dag - I (K^dag K with adjoint_first).

    ``levels`` restricts the check to the block of the lowest levels, where
    products of truncated ladder matrices are exact.
    """
    d = ops[0].K.shape[0]
    acc = np.zeros((d, d), dtype=np.complex128)
    for op in ops:
        acc += op.sign * (op.K.conj().T @ op.K if adjoint_first else op.K @ op.K.conj().T)
    acc -= np.eye(d)
    n = d if levels is None else levels
    return float(np.linalg.norm(acc[:n, :n]))


# Phase-space oracle


def oracle_generator(
    params: MonomialParams,
    dim: int,
    grid: PhaseGrid,
    dt_probe: float = 1e-4,
    probe_dim: int | None = None,
    conditioning_tol: float = 1e-3,
) -> np.ndarray:
    """Generator superoperator obtained by differentiating the phase-space route.

    Column E is (R_E(+dt) - R_E(-dt)) / (2 dt), where R_E(t) is the inverse
    map of the flowed symbol of the basis operator E. Inputs and outputs
    span levels < probe_dim (default dim); kernel elements are exact there.
    A ConditioningWarning is raised when the central difference changes by
    more than ``conditioning_tol`` (relative) when dt is doubled.
    """
    if probe_dim is None:
        probe_dim = dim
    if not 1 <= probe_dim <= dim:
        raise InvalidDimensionError(f"probe_dim must lie in 1..{dim}, got {probe_dim}")
    d = probe_dim
    nodes = grid.nodes
    npts = nodes.size
    if params.coupling == 0:
        return np.zeros((d * d, d * d), dtype=np.complex128)

    def derivative(dt):
        acc = np.zeros((d * d, d * d), dtype=np.complex128)
        chunk = 4096
        for start in range(0, npts, chunk):
            pts = nodes[start : start + chunk]
            gv = _backend.kernel_block(pts, d).transpose(0, 2, 1).reshape(pts.size, d * d)
            s_plus = _backend.kernel_block(flow_points(params, pts, -dt), d).reshape(pts.size, d * d)
            s_minus = _backend.kernel_block(flow_points(params, pts, dt), d).reshape(pts.size, d * d)
            acc += gv.T @ (s_plus - s_minus)
        return acc * (grid.weight / (2.0 * dt))

    G = derivative(dt_probe)
    G2 = derivative(2.0 * dt_probe)
    # D(2dt) - D(dt) ~ 3 c dt^2; flag when the truncation term is not small
    resid = np.linalg.norm(G2 - G) / 3.0
    scale = max(np.linalg.norm(G), 1e-300)
    if resid > conditioning_tol * scale:
        warnings.warn(
            f"oracle central difference residual {resid / scale:.2e} (relative) exceeds {conditioning_tol:g}; "
            "reduce dt_probe",
            ConditioningWarning,
            stacklevel=2,
        )
    return G


def oracle_spec(params: MonomialParams, dim: int, grid: PhaseGrid, dt_probe: float = 1e-4) -> GeneratorSpec:
    S = oracle_generator(params, dim, grid, dt_probe)
    h = symmetrized_hamiltonian(params, dim) if params.n < dim else np.zeros((dim, dim), complex)
    return GeneratorSpec(h, (), (), S, f"oracle({params.m},{params.n})")


def sub_block(S: np.ndarray, dim: int, levels: int) -> np.ndarray:
    """Restriction of a column-stacked superoperator to operators on levels < levels."""
    idx = np.array([r + s * dim for s in range(levels) for r in range(levels)])
    return S[np.ix_(idx, idx)]
