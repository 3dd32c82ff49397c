"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from twakraus import _fallback

try:
    from twakraus import _core
except ImportError:  # extension not built
    _core = None


def cases():
    x = np.linspace(-4, 4, 60)
    points = (x[:, None] + 1j * x[None, :]).ravel()
    d = 16
    j = np.arange(d)
    f = np.cos(np.add.outer(j, 2 * j)) + 1j * np.sin(np.multiply.outer(j + 1, j + 2))
    f = f + f.conj().T
    flow_args = (points[:1200] * 0.5, 2, 2, 1.0, 0.05, 1e-3, 0.005, 10.0, None)
    a = f[:12, :12].copy()
    return {
        "kernel_block 3600 x 16": lambda m: m.kernel_block(points, d),
        "symbol_values 3600, dim 16": lambda m: m.symbol_values(f, points),
        "rk4_flow Kerr 1200 nodes": lambda m: m.rk4_flow(*flow_args),
        "jacobi_eigh 12 x 12": lambda m: m.jacobi_eigh(a.copy()),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core is None:
        print("compiled extension not available; only the fallback can be timed")
    print(f"{'kernel':30s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speed-up':>9s}")
    for name, fn in cases().items():
        py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        if _core is None:
            print(f"{name:30s} {py:12.2f} {'-':>14s} {'-':>9s}")
            continue
        cc = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:30s} {py:12.2f} {cc:14.2f} {py / cc:8.1f}x")


if __name__ == "__main__":
    main()
