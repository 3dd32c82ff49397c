import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_density, kerr_orbit
from twakraus import classical, fock, phasespace as ps
from twakraus.errors import DivergenceError, NonHermitianError
from twakraus.fock import MonomialParams


def test_velocity_examples():
    assert classical.hamilton_velocity(fock.KERR, 1.0) == pytest.approx(-4j)
    assert classical.hamilton_velocity(fock.HARMONIC, 0.5j) == pytest.approx(1.0)
    v = classical.hamilton_velocity(fock.SHG, np.array([0.0, 1.0]))
    assert np.allclose(v, [0, -3j])


@pytest.mark.parametrize("alpha0", [0.3, 1.0 + 0.5j, -1.5j])
def test_kerr_flow_matches_orbit(alpha0):
    tr = classical.flow(fock.KERR, alpha0, 0.2)
    assert abs(tr.end - kerr_orbit(alpha0, 0.2)) <= 1e-9
    assert tr.steps >= 200


def test_harmonic_flow_rotates():
    end = classical.flow(fock.HARMONIC, 1.0, np.pi / 4).end
    assert end == pytest.approx(np.exp(-0.5j * np.pi), abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(-1.5, 1.5),
    st.floats(-1.5, 1.5),
    st.floats(0.01, 0.3),
)
def test_flow_is_reversible_and_conserves_energy(x, y, t):
    a0 = complex(x, y)
    end = classical.flow(fock.SHG, a0, t).end
    back = classical.flow(fock.SHG, end, -t).end
    assert abs(back - a0) <= 1e-8
    e0 = ps.hamiltonian_symbol(fock.SHG, a0)
    assert ps.hamiltonian_symbol(fock.SHG, end) == pytest.approx(e0, abs=1e-8 * max(1, abs(e0)))


def test_default_steps_rule():
    assert classical.default_steps(fock.HARMONIC, 0.1, 0.01) == 10
    slow = classical.default_steps(fock.KERR, 0.5, 0.1)
    fast = classical.default_steps(fock.KERR, 3.0, 0.1)
    assert fast > slow >= 100


def test_divergence_reports_nodes():
    p = MonomialParams(1, 3)
    with pytest.raises(DivergenceError) as info:
        classical.flow_points(p, [0.1, 3.0], 1.0)
    assert 3.0 in info.value.nodes
    assert 0.1 not in info.value.nodes


def test_trajectory_samples_and_csv(tmp_path):
    times = np.linspace(0, 0.1, 6)
    pts = classical.trajectory_samples(fock.KERR, 1.0, times)
    assert np.allclose(pts, kerr_orbit(1.0, times), atol=1e-9)
    path = tmp_path / "traj.csv"
    classical.write_trajectory_csv(path, times, pts)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,re_alpha,im_alpha" and len(lines) == 7


def test_harmonic_twa_is_exact():
    d = 20
    psi0 = fock.coherent_state(0.5 + 0.2j, d)
    rho0 = fock.density(psi0)
    grid = ps.PhaseGrid(6.0, 100)
    H = fock.symmetrized_hamiltonian(fock.HARMONIC, d)
    R = classical.reconstruct_R(rho0, grid, fock.HARMONIC, 0.3)
    assert np.linalg.norm(R - exact_density(psi0, H, 0.3)) <= 1e-6


def test_kerr_twa_preserves_trace_not_purity():
    d = 24
    rho0 = fock.density(fock.coherent_state(1.0, d))
    grid = ps.PhaseGrid(6.0, 100)
    f = classical.twa_field(rho0, grid, fock.KERR, 0.1)
    assert ps.integrate(f) == pytest.approx(1, abs=1e-6)
    # the flow is area preserving, so the phase-space purity is conserved too
    assert ps.purity(f) == pytest.approx(1, abs=1e-5)
    R = ps.inverse_map(f, d)
    assert np.trace(R @ R).real == pytest.approx(1, abs=1e-4)
    assert np.linalg.eigvalsh(R).min() < -1e-3


def test_twa_fields_match_single_shots():
    d = 12
    rho0 = fock.density(fock.coherent_state(0.6, d))
    grid = ps.PhaseGrid(4.0, 30)
    times = [0.0, 0.02, 0.05, 0.05]
    got = list(classical.twa_fields(rho0, grid, fock.KERR, times))
    assert [t for t, _ in got] == times
    for t, f in got:
        ref = classical.twa_field(rho0, grid, fock.KERR, t)
        assert np.allclose(f.values, ref.values, atol=1e-10)
    with pytest.raises(ValueError):
        list(classical.twa_fields(rho0, grid, fock.KERR, [0.1, 0.05]))


def test_twa_expectation_of_number():
    d = 20
    rho0 = fock.density(fock.coherent_state(0.8, d))
    grid = ps.PhaseGrid(6.0, 90)
    a, ad = fock.ladder(d)
    f = classical.twa_field(rho0, grid, fock.KERR, 0.15)
    assert classical.twa_expectation(ad @ a, f) == pytest.approx(0.64, abs=1e-5)


def test_rejects_bad_states():
    grid = ps.PhaseGrid(3.0, 10)
    with pytest.raises(ValueError):
        classical.twa_field(0.5 * np.eye(3), grid, fock.KERR, 0.1)
    x = np.diag([1.0, 0, 0]).astype(complex)
    x[0, 1] = 0.5
    with pytest.raises(NonHermitianError):
        classical.twa_field(x, grid, fock.KERR, 0.1)
