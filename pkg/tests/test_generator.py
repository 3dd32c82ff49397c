import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bopp_generator, exact_density, random_hermitian
from twakraus import fock, generator as g, phasespace as ps
from twakraus.errors import (
    ConditioningWarning,
    IndexRangeError,
    InvalidDimensionError,
    NonHermitianError,
    ShapeMismatchError,
    StepSizeError,
)
from twakraus.fock import MonomialParams


@pytest.fixture(scope="module")
def kerr16():
    return g.kerr_generator(16)


@pytest.fixture(scope="module")
def shg16():
    return g.shg_generator(16)


def test_vec_convention():
    x = np.arange(6.0).reshape(2, 3) + 0j
    assert np.array_equal(g.vec(x), [0, 3, 1, 4, 2, 5])
    y = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(g.unvec(g.vec(y)), y)


def test_left_right_multiplication():
    rng = np.random.default_rng(0)
    A, B, X = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(g.left_mult(A) @ g.vec(X), g.vec(A @ X))
    assert np.allclose(g.right_mult(B) @ g.vec(X), g.vec(X @ B))


def test_build_L_examples():
    d = 6
    a, ad = fock.ladder(d)
    L, Lt = g.build_L_jk(2, 2, 1, 0, d)
    ref = ad - 1j * a @ ad @ ad
    assert np.allclose(L[:4, :4], ref[:4, :4])
    assert np.allclose(Lt - L, 2j * (L - ad) / -1j)
    with pytest.raises(IndexRangeError):
        g.build_L_jk(2, 2, 3, 0, d)
    with pytest.raises(IndexRangeError):
        g.build_L_jk(2, 1, 0, 2, d)


def test_partner_is_adjoint_of_swapped():
    d = 10
    _, Lt = g.build_L_jk(2, 1, 1, 0, d)
    L01, _ = g.build_L_jk(1, 2, 0, 1, d)
    assert np.allclose(Lt, L01.conj().T)


def test_channel_apply_examples():
    d = 4
    a, _ = fock.ladder(d)
    ch = g.LindbladChannel(1.0, a, "a")
    R = fock.density(fock.fock_state(1, d))
    out = g.channel_apply(ch, R)
    assert np.allclose(np.diag(out).real, [2, -2, 0, 0])
    with pytest.raises(ShapeMismatchError):
        g.channel_apply(ch, np.eye(3))


@pytest.mark.parametrize("name", ["kerr", "shg"])
def test_channels_match_bopp_generator(name, kerr16, shg16):
    spec, p = (kerr16, fock.KERR) if name == "kerr" else (shg16, fock.SHG)
    B = bopp_generator(p.m, p.n, 16)
    S = g.superoperator(spec)
    assert np.linalg.norm(g.sub_block(B, 16, 8) - g.sub_block(S, 16, 8), 2) <= 1e-10


def test_harmonic_generator_is_unitary():
    d = 12
    spec = g.harmonic_generator(d)
    assert spec.channels == ()
    psi0 = fock.coherent_state(0.4, d)
    R = g.evolve_R(spec, fock.density(psi0), 0.2)
    assert np.linalg.norm(R - exact_density(psi0, spec.h_eff, 0.2)) <= 1e-10


@pytest.mark.parametrize("name", ["kerr", "shg"])
def test_f_form_equals_channels(name, kerr16, shg16):
    spec = kerr16 if name == "kerr" else shg16
    R = random_hermitian(16, 6, seed=7)
    diff = g.f_form_apply(spec, R) - g.dissipator(spec, R)
    assert np.linalg.norm(diff[:8, :8]) <= 1e-10


def test_half_kerr_f_form_does_not_match(kerr16):
    R = random_hermitian(16, 6, seed=8)
    half = g.GeneratorSpec(kerr16.h_eff, (), tuple((0.5 * c, A, B) for c, A, B in kerr16.f_form))
    diff = g.f_form_apply(half, R) - g.dissipator(kerr16, R)
    assert np.linalg.norm(diff[:8, :8]) > 1.0


@pytest.mark.parametrize("name", ["kerr", "shg"])
def test_rhs_matches_superoperator_and_keeps_trace(name, kerr16, shg16):
    spec = kerr16 if name == "kerr" else shg16
    R = random_hermitian(16, 6, seed=9)
    out = g.rhs(spec, R)
    assert np.allclose(g.vec(out), g.superoperator(spec) @ g.vec(R))
    assert np.allclose(out, out.conj().T)
    assert abs(np.trace(out)) <= 1e-10


def test_rhs_shape_check(kerr16):
    with pytest.raises(ShapeMismatchError):
        g.rhs(kerr16, np.eye(5))


def test_generator_dimension_guards():
    with pytest.raises(InvalidDimensionError):
        g.kerr_generator(5)
    with pytest.raises(InvalidDimensionError):
        g.shg_generator(4)
    with pytest.raises(ValueError):
        g.generator_for(MonomialParams(1, 3), 10)
    assert g.generator_for(fock.KERR, 8).label == "kerr"


def test_evolve_series_steps_onto_samples(kerr16):
    R0 = fock.density(fock.coherent_state(0.5, 16))
    times = [0.0, 0.01, 0.02]
    series = g.evolve_series(kerr16, R0, times)
    assert np.array_equal(series[0], R0)
    assert np.allclose(series[2], g.evolve_R(kerr16, series[1], 0.01), atol=1e-12)
    for R in series:
        assert np.trace(R).real == pytest.approx(1.0, abs=1e-10)


def test_evolve_rejects_bad_input(kerr16):
    with pytest.raises(ValueError):
        g.evolve_series(kerr16, 0.5 * np.eye(16), [0.1])
    R0 = fock.density(fock.fock_state(0, 16))
    R0[0, 1] = 0.3
    with pytest.raises(NonHermitianError):
        g.evolve_series(kerr16, R0, [0.1])


def test_large_step_is_flagged(kerr16):
    R0 = fock.density(fock.coherent_state(1.0, 16))
    with pytest.raises(StepSizeError):
        g.evolve_series(kerr16, R0, [0.5], max_step=0.05)
    assert g.default_step(kerr16) < g.RK4_STABILITY / g.rate_bound(kerr16)


def test_short_time_is_first_order(kerr16):
    R0 = fock.density(fock.coherent_state(0.5, 16))
    errs = [np.linalg.norm(g.short_time_R(kerr16, R0, t) - g.evolve_R(kerr16, R0, t)) for t in (1e-3, 5e-4)]
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.05)


def test_kraus_matches_euler_to_second_order(kerr16):
    R = fock.density(fock.low_excited_state(0.3, 16))
    errs = []
    for dt in (1e-3, 5e-4, 2.5e-4):
        euler = R + dt * g.rhs(kerr16, R)
        errs.append(np.linalg.norm(g.kraus_step(kerr16, R, dt) - euler))
    assert math.log2(errs[1] / errs[2]) == pytest.approx(2.0, abs=0.05)


def test_kraus_set_layout(shg16):
    ops = g.kraus_operators(shg16, 1e-3)
    assert ops[0].label == "K0" and len(ops) == 9
    assert [op.sign for op in ops[1:]] == [1, 1, -1, -1, 1, 1, -1, -1]
    assert np.array_equal(g.kraus_step(shg16, np.eye(16) / 16, 0.0), np.eye(16) / 16)


def test_kraus_completeness_is_second_order(kerr16):
    c1 = g.kraus_completeness(g.kraus_operators(kerr16, 1e-3), levels=8)
    c2 = g.kraus_completeness(g.kraus_operators(kerr16, 5e-4), levels=8)
    assert math.log2(c1 / c2) == pytest.approx(2.0, abs=0.05)
    both = g.kraus_completeness(g.kraus_operators(kerr16, 1e-3), levels=8, adjoint_first=True)
    assert both < 1e-2


def test_printed_kraus_variant_is_first_order(kerr16):
    R = fock.density(fock.low_excited_state(0.3, 16))
    errs = []
    for dt in (1e-3, 5e-4):
        euler = R + dt * g.rhs(kerr16, R)
        errs.append(np.linalg.norm(g.kraus_step(kerr16, R, dt, printed=True) - euler))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(1.0, abs=0.1)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(-0.5, 0.5))
def test_kraus_step_preserves_trace_and_hermiticity(x, y):
    spec = g.kerr_generator(10)
    R = fock.density(fock.coherent_state(complex(x, y), 10))
    out = g.kraus_step(spec, R, 1e-3)
    assert np.allclose(out, out.conj().T)
    # trace error of the signed Kraus step is O(dt^2)
    assert abs(np.trace(out).real - 1) <= 1e-4


@pytest.fixture(scope="module")
def grid():
    return ps.PhaseGrid.default(0.0)


@pytest.mark.parametrize("p,tol", [(fock.KERR, 1e-3), (fock.SHG, 1e-4)])
def test_oracle_matches_channels(p, tol, grid):
    S = g.superoperator(g.generator_for(p, 16))
    O = g.oracle_generator(p, 16, grid, probe_dim=6)
    assert np.linalg.norm(O - g.sub_block(S, 16, 6), 2) <= tol


def test_oracle_generic_monomial_matches_bopp(grid):
    p = MonomialParams(1, 3)
    O = g.oracle_generator(p, 16, grid, probe_dim=5)
    B = g.sub_block(bopp_generator(1, 3, 16), 16, 5)
    assert np.linalg.norm(O - B, 2) <= 1e-2 * np.linalg.norm(B, 2)


def test_oracle_zero_coupling_and_guards(grid):
    O = g.oracle_generator(MonomialParams(2, 2, 0.0), 8, grid, probe_dim=3)
    assert O.shape == (9, 9) and not O.any()
    with pytest.raises(InvalidDimensionError):
        g.oracle_generator(fock.KERR, 8, grid, probe_dim=9)


def test_oracle_conditioning_warning(grid):
    with pytest.warns(ConditioningWarning):
        g.oracle_generator(fock.KERR, 10, ps.PhaseGrid(5.0, 60), dt_probe=0.05, probe_dim=4)


def test_oracle_spec_rhs(grid):
    spec = g.oracle_spec(fock.SHG, 5, grid)
    R = random_hermitian(5, 3, seed=10)
    ref = g.rhs(g.shg_generator(16), np.pad(R, (0, 11)))[:5, :5]
    assert np.linalg.norm(g.rhs(spec, R) - ref) <= 1e-4
    with pytest.raises(ShapeMismatchError):
        g.rhs(spec, np.eye(4))
    with pytest.raises(ValueError):
        g.kraus_operators(spec, 1e-3)
