"""Operator algebra on a truncated single-mode Fock space.

Operators are plain ``complex128`` numpy arrays of shape ``(dim, dim)`` on
levels ``0..dim-1``; states are 1-D arrays of length ``dim``. Units have
hbar = 1 and dimensionless couplings and times.

Products of ladder operators are always assembled in normal order
(creation operators to the left). Normal-ordered products have exact matrix
elements inside the truncated space, whereas products such as ``a @ a_dag``
computed with truncated matrices are wrong on the top levels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, NonHermitianError, TruncationError, TruncationWarning

TAIL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class MonomialParams:
    """Indices of the symmetrized Hamiltonian {a^dag^m a^n + a^dag^n a^m}_sym."""

    m: int
    n: int
    coupling: float = 1.0

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError(f"monomial indices must be non-negative, got m={self.m}, n={self.n}")
        if self.n < self.m:
            raise ValueError(f"need n >= m, got m={self.m}, n={self.n}")
        if self.m + self.n < 1:
            raise ValueError("need n + m >= 1")

    @property
    def degree(self) -> int:
        return self.m + self.n

    @property
    def is_harmonic(self) -> bool:
        return self.degree <= 2


KERR = MonomialParams(2, 2)
SHG = MonomialParams(1, 2)
HARMONIC = MonomialParams(1, 1)


def _check_dim(dim, minimum=1):
    if int(dim) != dim or dim < minimum:
        raise InvalidDimensionError(f"dimension must be an integer >= {minimum}, got {dim}")
    return int(dim)


def ladder(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators truncated to ``dim`` levels."""
    dim = _check_dim(dim, 2)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(np.complex128)
    return a, a.conj().T.copy()


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(np.complex128)


def normal_reorder_coeffs(k: int, l: int) -> list[tuple[int, float]]:
    """Coefficients c_p with a^k a^dag^l = sum_p c_p a^dag^(l-p) a^(k-p).

    c_p = k! l! / (p! (k-p)! (l-p)!), i.e. the number of ways to contract p
    pairs.
    """
    if k < 0 or l < 0:
        raise ValueError("powers must be non-negative")
    return [
        (p, float(math.factorial(k) * math.factorial(l) // (math.factorial(p) * math.factorial(k - p) * math.factorial(l - p))))
        for p in range(min(k, l) + 1)
    ]


def normal_product(i: int, j: int, dim: int) -> np.ndarray:
    """a^dag^i a^j with exact matrix elements on every truncated level."""
    a, ad = ladder(dim)
    return np.linalg.matrix_power(ad, i) @ np.linalg.matrix_power(a, j)


def anti_normal_product(k: int, l: int, dim: int) -> np.ndarray:
    """a^k a^dag^l, expanded into normal order before truncation."""
    out = np.zeros((dim, dim), dtype=np.complex128)
    for p, c in normal_reorder_coeffs(k, l):
        out += c * normal_product(l - p, k - p, dim)
    return out


def _weyl_monomial(m, n, dim):
    # Weyl-symmetrized a^dag^m a^n in normal order
    out = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(min(m, n) + 1):
        c = math.comb(m, k) * math.comb(n, k) * math.factorial(k) * 0.5**k
        out += c * normal_product(m - k, n - k, dim)
    return out


def symmetrized_hamiltonian(params: MonomialParams, dim: int) -> np.ndarray:
    """H_mn = {a^dag^m a^n + a^dag^n a^m}_sym, scaled by the coupling."""
    dim = _check_dim(dim, 2)
    if params.n >= dim:
        raise InvalidDimensionError(f"n={params.n} needs dim > n, got dim={dim}")
    m, n = params.m, params.n
    h = _weyl_monomial(m, n, dim) + _weyl_monomial(n, m, dim)
    return params.coupling * h


def effective_hamiltonian(params: MonomialParams, dim: int) -> np.ndarray:
    """(n+m)/2^(n+m) (a^dag^m a^n + a^dag^n a^m + a^n a^dag^m + a^m a^dag^n)."""
    dim = _check_dim(dim, 2)
    if params.n >= dim:
        raise InvalidDimensionError(f"n={params.n} needs dim > n, got dim={dim}")
    m, n = params.m, params.n
    h = (
        normal_product(m, n, dim)
        + normal_product(n, m, dim)
        + anti_normal_product(n, m, dim)
        + anti_normal_product(m, n, dim)
    )
    return params.coupling * (n + m) / 2.0 ** (n + m) * h


def coherent_tail(alpha: complex, dim: int) -> float:
    """Population of level dim-1 in the untruncated coherent state |alpha>."""
    r2 = abs(alpha) ** 2
    k = dim - 1
    if r2 == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(-r2 + k * math.log(r2) - math.lgamma(k + 1))


def _warn_tail(alpha, dim, what):
    tail = coherent_tail(alpha, dim)
    if tail > TAIL_TOLERANCE:
        warnings.warn(
            f"{what}: coherent tail population {tail:.2e} at level {dim - 1} "
            f"(alpha={alpha}); increase dim",
            TruncationWarning,
            stacklevel=3,
        )


def displacement(alpha: complex, dim: int) -> np.ndarray:
    """D(alpha) = exp(alpha a^dag - alpha* a) in the truncated space.

    Exponentiates through the eigendecomposition of the Hermitian generator
    i(alpha a^dag - alpha* a).
    """
    a, ad = ladder(dim)
    _warn_tail(alpha, dim, "displacement")
    gen = 1j * (alpha * ad - np.conj(alpha) * a)
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * w)) @ v.conj().T


def parity(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    return np.diag((-1.0) ** np.arange(dim)).astype(np.complex128)


def fock_state(n: int, dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock level {n} outside 0..{dim - 1}")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[n] = 1.0
    return psi


def coherent_state(alpha: complex, dim: int, warn: bool = True) -> np.ndarray:
    """Poisson amplitudes exp(-|alpha|^2/2) alpha^k / sqrt(k!), renormalized.

    ``warn=False`` skips the tail check, for callers that only need a unit vector.
    """
    dim = _check_dim(dim)
    if warn:
        _warn_tail(alpha, dim, "coherent_state")
    psi = np.empty(dim, dtype=np.complex128)
    psi[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, dim):
        psi[k] = psi[k - 1] * alpha / math.sqrt(k)
    return psi / np.linalg.norm(psi)


def low_excited_state(alpha: complex, dim: int) -> np.ndarray:
    """(|0> + alpha |1>) / sqrt(1 + |alpha|^2)."""
    dim = _check_dim(dim, 2)
    psi = np.zeros(dim, dtype=np.complex128)
    psi[0] = 1.0
    psi[1] = alpha
    return psi / math.sqrt(1.0 + abs(alpha) ** 2)


def state_prep(kind: str, dim: int, *, n: int | None = None, alpha: complex | None = None) -> np.ndarray:
    """Unit-norm initial state: ``fock`` (needs n), ``coherent`` or ``low_excited`` (need alpha)."""
    if kind == "fock":
        if n is None:
            raise ValueError("fock state needs n")
        return fock_state(int(n), dim)
    if alpha is None:
        raise ValueError(f"{kind} state needs alpha")
    if kind == "coherent":
        return coherent_state(complex(alpha), dim)
    if kind == "low_excited":
        return low_excited_state(complex(alpha), dim)
    raise ValueError(f"unknown state kind {kind!r}")


def density(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def is_hermitian(op: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= tol * max(1.0, np.max(np.abs(op), initial=0.0)))


def require_hermitian(op: np.ndarray, tol: float = 1e-10, what: str = "operator") -> None:
    if not is_hermitian(op, tol):
        dev = np.max(np.abs(op - op.conj().T))
        raise NonHermitianError(f"{what} is not Hermitian (max |A - A^dag| = {dev:.3e})")


def max_populated_level(op: np.ndarray, threshold: float = 1e-12) -> int:
    """Highest level whose diagonal weight exceeds threshold * total weight."""
    diag = np.abs(np.diag(op)) if op.ndim == 2 else np.abs(op) ** 2
    total = diag.sum()
    if total == 0:
        return -1
    hits = np.flatnonzero(diag > threshold * total)
    return int(hits[-1]) if hits.size else -1


def check_truncation(op: np.ndarray, tol: float = TAIL_TOLERANCE) -> None:
    """Fail fast when the last Fock level carries more than tol of the weight."""
    diag = np.abs(np.diag(op)) if op.ndim == 2 else np.abs(op) ** 2
    total = diag.sum()
    if total > 0 and diag[-1] > tol * total:
        raise TruncationError(
            f"population {diag[-1] / total:.2e} at level {diag.size - 1} exceeds {tol:g}; increase dim"
        )
