"""Spectral diagnostics of R(t): negativity, min-max bounds, fidelity and fitted rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _backend
from .errors import ConvergenceError, EmptyFamilyError, NonHermitianError
from .fock import coherent_state, require_hermitian
from .generator import GeneratorSpec, rhs

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
ORTHOGONALITY_TOLERANCE = 1e-10
IMAG_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted descending; eigenvectors are the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    sweeps: int = 0

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])


def hermitian_eigen(R: np.ndarray, tol: float = JACOBI_TOLERANCE, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Spectrum:
    """Full spectrum by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm is below tol * max(1, ||R||_F).
    """
    R = np.asarray(R, dtype=np.complex128)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"need a square matrix, got shape {R.shape}")
    require_hermitian(R, 1e-10, "eigensolver input")
    R = 0.5 * (R + R.conj().T)
    evals, vecs, sweeps, off = _backend.jacobi_eigh(R, tol, max_sweeps)
    if off > tol * max(1.0, float(np.linalg.norm(R))):
        raise ConvergenceError(f"Jacobi off-diagonal norm {off:.3e} after {sweeps} sweeps")
    order = np.argsort(-evals, kind="stable")
    return Spectrum(evals[order], vecs[:, order], sweeps)


def sum_rules(spec: Spectrum) -> tuple[float, float, float]:
    """(sum lambda, sum lambda^2, sum lambda (1 - lambda))."""
    lam = spec.eigenvalues
    s1 = float(lam.sum())
    s2 = float((lam**2).sum())
    return s1, s2, float((lam * (1.0 - lam)).sum())


def negativity(spec: Spectrum) -> tuple[float, float]:
    """(smallest eigenvalue, sum of the negative eigenvalues)."""
    lam = spec.eigenvalues
    return float(lam[-1]), float(lam[lam < 0].sum())


# min-max trial families


def _two_level_base(psi0):
    # state orthogonal to psi0 inside span{|0>, |1>}
    u = np.zeros_like(psi0)
    u[0] = np.conj(psi0[1])
    u[1] = -np.conj(psi0[0])
    if np.linalg.norm(u) == 0:
        u[1] = 1.0
    return u


def trial_state(family: str, psi0: np.ndarray, beta: complex) -> np.ndarray | None:
    """Normalized trial state orthogonal to psi0, or None when degenerate.

    ``two_level``: (u + beta |2>) with u the complement of psi0 in span{|0>,|1>}.
    ``coherent_orthogonalized``: (|beta> - <psi0|beta> psi0) / sqrt(1 - |<psi0|beta>|^2).
    """
    dim = psi0.size
    if family == "two_level":
        if dim < 3:
            raise EmptyFamilyError("two_level family needs dim >= 3")
        v = _two_level_base(psi0)
        v[2] += beta
    elif family == "coherent_orthogonalized":
        # any unit vector gives a valid bound, so a truncated tail is harmless here
        v = coherent_state(beta, dim, warn=False)
    else:
        raise ValueError(f"unknown family {family!r}")
    v = v - np.vdot(psi0, v) * psi0
    nrm = np.linalg.norm(v)
    if nrm < 1e-6:
        return None
    v = v / nrm
    if abs(np.vdot(psi0, v)) > ORTHOGONALITY_TOLERANCE:
        v = v - np.vdot(psi0, v) * psi0
        v = v / np.linalg.norm(v)
        if abs(np.vdot(psi0, v)) > ORTHOGONALITY_TOLERANCE:
            return None
    return v


def beta_grid(center: complex, half_width: float = 2.0, points: int = 21) -> np.ndarray:
    x = np.linspace(-half_width, half_width, points)
    return (center + x[:, None] + 1j * x[None, :]).ravel()


@dataclass(frozen=True)
class MinMaxResult:
    value: float
    beta: complex
    trials: int


def minmax_search(
    X: np.ndarray,
    psi0: np.ndarray,
    family: str = "two_level",
    center: complex | None = None,
    half_width: float = 2.0,
    points: int = 21,
    refine: bool = True,
) -> MinMaxResult:
    """Minimize <phi|X|phi> over a beta grid of trial states orthogonal to psi0.

    The best grid point is polished with Nelder-Mead when ``refine`` is set.
    """
    psi0 = np.asarray(psi0, dtype=np.complex128)
    psi0 = psi0 / np.linalg.norm(psi0)
    if center is None:
        center = 0.0 if family == "two_level" else _mean_alpha(psi0)

    def value(beta):
        phi = trial_state(family, psi0, beta)
        if phi is None:
            return None
        return float(np.vdot(phi, X @ phi).real)

    best, best_beta, count = math.inf, None, 0
    for beta in beta_grid(center, half_width, points):
        v = value(beta)
        if v is None:
            continue
        count += 1
        if v < best:
            best, best_beta = v, beta
    if best_beta is None:
        raise EmptyFamilyError(f"no admissible trial state in the {family} family")
    if refine:
        def obj(x):
            v = value(complex(x[0], x[1]))
            return math.inf if v is None else v

        res = minimize(obj, [best_beta.real, best_beta.imag], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if np.isfinite(res.fun) and res.fun < best:
            best, best_beta = float(res.fun), complex(res.x[0], res.x[1])
        count += int(res.nfev)
    return MinMaxResult(best, complex(best_beta), count)


def _mean_alpha(psi):
    dim = psi.size
    return complex(np.vdot(psi[:-1], np.sqrt(np.arange(1, dim)) * psi[1:]))


def minmax_bound(R: np.ndarray, psi0: np.ndarray, family: str = "two_level", **kwargs) -> float:
    """Upper bound min_phi <phi|R|phi> on the smallest eigenvalue, phi orthogonal to psi0."""
    require_hermitian(np.asarray(R), 1e-10, "R")
    return minmax_search(np.asarray(R, dtype=np.complex128), psi0, family, **kwargs).value


def minmax_short_time(spec: GeneratorSpec, R0: np.ndarray, psi0: np.ndarray, family: str = "two_level", **kwargs) -> float:
    """min_phi <phi|L(R0)|phi> per unit time; the commutator part drops out for phi orthogonal to psi0."""
    X = rhs(spec, np.asarray(R0, dtype=np.complex128))
    return minmax_search(0.5 * (X + X.conj().T), psi0, family, **kwargs).value


# reference dynamics and overlaps


def exact_evolve(psi0: np.ndarray, H: np.ndarray, t: float, spectrum: Spectrum | None = None) -> np.ndarray:
    """psi(t) = sum_k exp(-i E_k t) <E_k|psi0> |E_k>."""
    if spectrum is None:
        spectrum = hermitian_eigen(H)
    V = spectrum.eigenvectors
    c = V.conj().T @ np.asarray(psi0, dtype=np.complex128)
    return V @ (np.exp(-1j * spectrum.eigenvalues * t) * c)


def _real_expectation(R, psi, what):
    val = np.vdot(psi, np.asarray(R) @ psi)
    if abs(val.imag) > IMAG_TOLERANCE * max(1.0, float(np.linalg.norm(R))):
        raise NonHermitianError(f"{what}: imaginary residue {abs(val.imag):.3e}")
    return float(val.real)


def fidelity(R: np.ndarray, psi_t: np.ndarray) -> float:
    """<psi(t)|R(t)|psi(t)> with the exactly evolved state."""
    return _real_expectation(R, psi_t, "fidelity")


def self_correlation(R: np.ndarray, psi0: np.ndarray) -> float:
    """<psi(0)|R(t)|psi(0)>."""
    return _real_expectation(R, psi0, "self_correlation")


# rate extraction


@dataclass(frozen=True)
class RateEstimate:
    """Least-squares fit; for the power model slope is the exponent and intercept the prefactor."""

    slope: float
    intercept: float
    residual: float
    window: tuple[float, float]
    model: str = "linear"


def rate_fit(series, model: str = "linear", window: tuple[float, float] | None = None) -> RateEstimate:
    """Fit (t, value) samples.

    ``linear``: value = slope t + intercept.
    ``quadratic``: value = slope t^2 (through the origin; pass 1 - F for fidelity laws).
    ``power``: value = intercept t^slope, fitted in log-log.
    The residual is the largest absolute deviation of the fitted model.
    """
    arr = np.asarray(list(series), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("series must be (t, value) pairs")
    if window is not None:
        arr = arr[(arr[:, 0] >= window[0]) & (arr[:, 0] <= window[1])]
    if arr.shape[0] < 5:
        raise ValueError(f"rate_fit needs at least 5 points, got {arr.shape[0]}")
    t, y = arr[:, 0], arr[:, 1]
    win = (float(t.min()), float(t.max()))
    if model == "linear":
        A = np.column_stack([t, np.ones_like(t)])
        (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
        fit = slope * t + icpt
    elif model == "quadratic":
        x = t**2
        slope = float(x @ y / (x @ x))
        icpt = 0.0
        fit = slope * x
    elif model == "power":
        if np.any(t <= 0) or np.any(y <= 0):
            raise ValueError("power model needs positive t and values")
        A = np.column_stack([np.log(t), np.ones_like(t)])
        (slope, logc), *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
        icpt = math.exp(logc)
        fit = icpt * t**slope
    else:
        raise ValueError(f"unknown model {model!r}")
    return RateEstimate(float(slope), float(icpt), float(np.max(np.abs(fit - y))), win, model)
