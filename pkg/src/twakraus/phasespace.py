"""Weyl symbols on a uniform phase-space grid and the inverse (reconstruction) map.

Conventions: the kernel is w(alpha) = 2 D(alpha) P D(alpha)^dag with P the
parity, the symbol of f is W_f(alpha) = Tr(f w(alpha)), and integrals use the
measure d^2 alpha / pi. With the factor 2 both the normalization integral and
the purity integral of a pure state equal one; the coherent-state symbol is
2 exp(-2 |alpha - alpha0|^2).
"""

from __future__ import annotations

import csv
import math
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from .errors import BoundaryLeakWarning, NonHermitianError
from .fock import MonomialParams

IMAG_TOLERANCE = 1e-10
BOUNDARY_TOLERANCE = 1e-8

# bytes; grids whose kernel stack exceeds this are evaluated chunk by chunk
KERNEL_CACHE_BUDGET = 512 * 2**20
_CHUNK = 4096


@dataclass(frozen=True)
class PhaseGrid:
    """Midpoint grid over the square |Re alpha|, |Im alpha| <= r_max.

    Node (j, k) sits at (-r_max + (j + 1/2) h) + i (-r_max + (k + 1/2) h)
    with h = 2 r_max / M, and carries quadrature weight h^2 / pi.
    """

    r_max: float
    points_per_axis: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 1:
            raise ValueError("points_per_axis must be a positive integer")

    @classmethod
    def default(cls, alpha0: complex = 0.0, h_max: float = 0.1) -> "PhaseGrid":
        r_max = abs(alpha0) + 4.0
        return cls(r_max, int(math.ceil(2 * r_max / h_max)))

    @property
    def h(self) -> float:
        return 2.0 * self.r_max / self.points_per_axis

    @property
    def weight(self) -> float:
        return self.h**2 / math.pi

    @property
    def axis(self) -> np.ndarray:
        return -self.r_max + (np.arange(self.points_per_axis) + 0.5) * self.h

    @property
    def nodes(self) -> np.ndarray:
        x = self.axis
        return (x[:, None] + 1j * x[None, :]).ravel()

    @property
    def size(self) -> int:
        return self.points_per_axis**2

    def boundary_mask(self) -> np.ndarray:
        m = self.points_per_axis
        edge = np.zeros((m, m), dtype=bool)
        edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
        return edge.ravel()


@dataclass
class WignerField:
    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size != self.grid.size:
            raise ValueError(f"field has {self.values.size} values, grid has {self.grid.size} nodes")

    def __mul__(self, c: float) -> "WignerField":
        return WignerField(self.grid, self.values * c)

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        write_field_csv(self, path)


def weyl_kernel(alpha: complex, dim: int) -> np.ndarray:
    """w(alpha) = 2 D(alpha) P D(alpha)^dag on levels < dim (exact elements)."""
    return _backend.kernel_block(np.array([alpha], dtype=np.complex128), dim)[0]


class KernelBank:
    """Weyl kernels for every node of a grid, stored or streamed in chunks."""

    def __init__(self, grid: PhaseGrid, dim: int, budget: int | None = None):
        self.grid = grid
        self.dim = dim
        budget = KERNEL_CACHE_BUDGET if budget is None else budget
        nbytes = grid.size * dim * dim * 16
        self._stack = _backend.kernel_block(grid.nodes, dim) if nbytes <= budget else None

    @property
    def cached(self) -> bool:
        return self._stack is not None

    def chunks(self):
        """Yield (slice, kernels) in fixed node order."""
        if self._stack is not None:
            yield slice(0, self.grid.size), self._stack
            return
        nodes = self.grid.nodes
        for start in range(0, nodes.size, _CHUNK):
            sl = slice(start, min(start + _CHUNK, nodes.size))
            yield sl, _backend.kernel_block(nodes[sl], self.dim)

    def flat(self):
        """(nodes, dim*dim) view of the kernel stack; only for cached banks."""
        return self._stack.reshape(self.grid.size, -1)

    def symbol_values(self, f: np.ndarray) -> np.ndarray:
        out = np.empty(self.grid.size, dtype=np.complex128)
        ft = np.ascontiguousarray(f, dtype=np.complex128).T.ravel()
        for sl, blk in self.chunks():
            out[sl] = blk.reshape(blk.shape[0], -1) @ ft
        return out

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        """sum_nodes coeffs[node] * w(node)."""
        acc = np.zeros(self.dim * self.dim, dtype=np.complex128)
        for sl, blk in self.chunks():
            acc += coeffs[sl] @ blk.reshape(blk.shape[0], -1)
        return acc.reshape(self.dim, self.dim)


_bank_lock = threading.Lock()
_banks: dict[tuple, KernelBank] = {}


def kernel_bank(grid: PhaseGrid, dim: int) -> KernelBank:
    """Shared KernelBank for (grid, dim); at most a budget's worth stays cached."""
    key = (grid.r_max, grid.points_per_axis, dim)
    with _bank_lock:
        bank = _banks.get(key)
        if bank is None:
            bank = KernelBank(grid, dim)
            if bank.cached:
                used = sum(b.grid.size * b.dim**2 * 16 for b in _banks.values())
                need = grid.size * dim * dim * 16
                while _banks and used + need > KERNEL_CACHE_BUDGET:
                    old = next(iter(_banks))
                    old_bank = _banks.pop(old)
                    used -= old_bank.grid.size * old_bank.dim**2 * 16
                _banks[key] = bank
        return bank


def clear_kernel_cache() -> None:
    with _bank_lock:
        _banks.clear()


def _real_or_raise(vals: np.ndarray, scale: float, what: str) -> np.ndarray:
    resid = float(np.max(np.abs(vals.imag), initial=0.0))
    if resid > IMAG_TOLERANCE * max(1.0, scale):
        raise NonHermitianError(f"{what}: imaginary residue {resid:.3e} in symbol; input not Hermitian")
    return vals.real.copy()


def symbol_at(f: np.ndarray, points) -> np.ndarray:
    """Real symbol values Tr(f w(alpha)) at arbitrary points."""
    vals = _backend.symbol_values(f, np.asarray(points, dtype=np.complex128))
    return _real_or_raise(vals, float(np.linalg.norm(f)), "symbol_at")


def symbol(f: np.ndarray, grid: PhaseGrid) -> WignerField:
    """Weyl symbol of a Hermitian operator sampled on the grid."""
    f = np.asarray(f, dtype=np.complex128)
    vals = kernel_bank(grid, f.shape[0]).symbol_values(f)
    return WignerField(grid, _real_or_raise(vals, float(np.linalg.norm(f)), "symbol"))


def boundary_leak(field_: WignerField) -> float:
    vals = np.abs(field_.values)
    peak = vals.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    return float(vals[field_.grid.boundary_mask()].max() / peak)


def inverse_map(field_: WignerField, dim: int) -> np.ndarray:
    """f = sum over nodes (h^2/pi) w(alpha_jk) W_jk, Hermitian by construction."""
    leak = boundary_leak(field_)
    if leak > BOUNDARY_TOLERANCE:
        warnings.warn(
            f"field reaches the grid boundary (edge/peak = {leak:.2e}); enlarge r_max",
            BoundaryLeakWarning,
            stacklevel=2,
        )
    coeffs = field_.values * field_.grid.weight
    out = kernel_bank(field_.grid, dim).combine(coeffs.astype(np.complex128))
    return 0.5 * (out + out.conj().T)


def integrate(field_: WignerField) -> float:
    return float(np.sum(field_.values) * field_.grid.weight)


def purity(field_: WignerField) -> float:
    return float(np.sum(field_.values**2) * field_.grid.weight)


def overlap(f1: WignerField, f2: WignerField) -> float:
    """Discrete form of Tr(f g) = int d^2 alpha / pi W_f W_g."""
    if f1.grid != f2.grid:
        raise ValueError("fields live on different grids")
    return float(np.sum(f1.values * f2.values) * f1.grid.weight)


def hamiltonian_symbol(params: MonomialParams, alpha) -> float | np.ndarray:
    """coupling * (alpha*^m alpha^n + alpha^m alpha*^n)."""
    z = np.asarray(alpha, dtype=np.complex128)
    zc = np.conj(z)
    val = params.coupling * 2.0 * np.real(zc**params.m * z**params.n)
    return float(val) if val.ndim == 0 else val


def write_field_csv(field_: WignerField, path) -> None:
    nodes = field_.grid.nodes
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_alpha", "im_alpha", "w"])
        for z, v in zip(nodes, field_.values):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v))])


def read_field_csv(path) -> WignerField:
    """Inverse of write_field_csv; the grid is recovered from the node layout."""
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    npts = data.shape[0]
    m = int(round(math.sqrt(npts)))
    if m * m != npts or m < 2:
        raise ValueError(f"{npts} rows is not a square grid of at least 2x2 nodes")
    re = data[:, 0].reshape(m, m)
    r_max = -re[0, 0] + 0.5 * (re[1, 0] - re[0, 0])
    grid = PhaseGrid(float(round(r_max, 12)), m)
    if not np.allclose(grid.nodes.real, data[:, 0], atol=1e-9) or not np.allclose(
        grid.nodes.imag, data[:, 1], atol=1e-9
    ):
        raise ValueError("CSV nodes do not form a midpoint grid in row-major order")
    return WignerField(grid, data[:, 2])
