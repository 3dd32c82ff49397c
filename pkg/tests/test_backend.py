import os
import subprocess
import sys

import numpy as np
import pytest

from oracles import random_hermitian
from twakraus import _backend, _fallback

core = pytest.importorskip("twakraus._core", reason="compiled extension not built")

POINTS = np.array([0.0, 0.3 - 0.2j, -1.1 + 0.7j, 2.0j, 3.5 + 0.1j])


def test_backend_name():
    assert _backend.NAME in ("compiled", "python")


def test_kernel_block_parity():
    assert np.allclose(core.kernel_block(POINTS, 14), _fallback.kernel_block(POINTS, 14), atol=1e-12)


def test_symbol_values_parity():
    f = random_hermitian(10, 10, seed=20)
    assert np.allclose(core.symbol_values(f, POINTS), _fallback.symbol_values(f, POINTS), atol=1e-12)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (1, 2), (1, 3)])
def test_flow_parity(m, n):
    z0 = POINTS[:4] * 0.5
    args = (z0, m, n, 1.0, 0.05, 1e-3, 0.005)
    assert np.array_equal(core.step_counts(*args), _fallback.step_counts(*args))
    e1, s1, ok1 = core.rk4_flow(*args, 10.0, None)
    e2, s2, ok2 = _fallback.rk4_flow(*args, 10.0, None)
    assert np.array_equal(ok1, ok2) and np.array_equal(s1, s2)
    assert np.allclose(e1, e2, atol=1e-12)


def test_flow_guard_parity():
    z0 = np.array([0.1, 3.0 + 0j])
    _, _, ok1 = core.rk4_flow(z0, 1, 3, 1.0, 1.0, 1e-3, 0.005, 10.0, None)
    _, _, ok2 = _fallback.rk4_flow(z0, 1, 3, 1.0, 1.0, 1e-3, 0.005, 10.0, None)
    assert list(ok1) == list(ok2) == [True, False]


def test_jacobi_parity():
    a = random_hermitian(9, 9, seed=21)
    w1, v1, _, off1 = core.jacobi_eigh(a.copy())
    w2, v2, _, off2 = _fallback.jacobi_eigh(a.copy())
    assert np.allclose(np.sort(w1), np.sort(w2), atol=1e-11)
    assert np.allclose(np.sort(w1), np.linalg.eigvalsh(a), atol=1e-11)
    assert off1 <= 1e-12 * np.linalg.norm(a) and off2 <= 1e-12 * np.linalg.norm(a)
    for w, v in ((w1, v1), (w2, v2)):
        assert np.allclose(a @ v, v * w, atol=1e-10)


def test_environment_forces_fallback():
    env = dict(os.environ, TWAKRAUS_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import twakraus; print(twakraus.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
