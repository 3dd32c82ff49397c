import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import symmetrized_bruteforce
from twakraus import fock
from twakraus.errors import InvalidDimensionError, TruncationError, TruncationWarning
from twakraus.fock import MonomialParams


def test_ladder_action_and_number():
    a, ad = fock.ladder(3)
    one = fock.fock_state(1, 3)
    assert np.allclose(a @ one, fock.fock_state(0, 3))
    assert np.allclose(ad @ a, np.diag([0, 1, 2]))
    assert np.allclose(ad, a.conj().T)


def test_truncated_commutator():
    a, ad = fock.ladder(4)
    assert np.allclose(a @ ad - ad @ a, np.diag([1, 1, 1, -3]))


def test_ladder_rejects_small_dim():
    with pytest.raises(InvalidDimensionError):
        fock.ladder(1)


def test_normal_reorder_examples():
    assert fock.normal_reorder_coeffs(1, 1) == [(0, 1.0), (1, 1.0)]
    assert fock.normal_reorder_coeffs(2, 2) == [(0, 1.0), (1, 4.0), (2, 2.0)]
    assert fock.normal_reorder_coeffs(0, 3) == [(0, 1.0)]


@pytest.mark.parametrize("k,l", [(k, l) for k in range(5) for l in range(5)])
def test_normal_reorder_matches_products(k, l):
    d = 14
    a, ad = fock.ladder(d)
    direct = np.linalg.matrix_power(a, k) @ np.linalg.matrix_power(ad, l)
    rebuilt = fock.anti_normal_product(k, l, d)
    keep = d - 1 - max(k, l)
    assert np.allclose(direct[:keep, :keep], rebuilt[:keep, :keep], atol=1e-9)


def test_symmetrized_examples():
    d = 8
    a, ad = fock.ladder(d)
    n = ad @ a
    assert np.allclose(np.diag(fock.symmetrized_hamiltonian(fock.HARMONIC, d)).real, 2 * np.arange(d) + 1)
    kerr = 2 * fock.normal_product(2, 2, d) + 4 * n + np.eye(d)
    assert np.allclose(fock.symmetrized_hamiltonian(fock.KERR, d), kerr)
    shg = fock.normal_product(1, 2, d) + fock.normal_product(2, 1, d) + a + ad
    assert np.allclose(fock.symmetrized_hamiltonian(fock.SHG, d), shg)


@pytest.mark.parametrize("m,n", [(m, n) for n in range(1, 7) for m in range(0, n + 1) if 1 <= m + n <= 6])
def test_symmetrized_against_bruteforce(m, n):
    d = 16
    got = fock.symmetrized_hamiltonian(MonomialParams(m, n), d)
    half = symmetrized_bruteforce(m, n, d)
    ref = half + half.conj().T
    assert np.linalg.norm(got[:9, :9] - ref[:9, :9]) <= 1e-10


def test_effective_hamiltonian_relations():
    d = 10
    hk = fock.effective_hamiltonian(fock.KERR, d)
    assert np.allclose(hk, 0.5 * fock.symmetrized_hamiltonian(fock.KERR, d) + 0.5 * np.eye(d))
    hs = fock.effective_hamiltonian(fock.SHG, d)
    assert np.allclose(hs, 0.75 * fock.symmetrized_hamiltonian(fock.SHG, d))
    p = MonomialParams(1, 3)
    assert np.abs(fock.effective_hamiltonian(p, d) - (4 / 8) * fock.symmetrized_hamiltonian(p, d)).max() == pytest.approx(0, abs=1e-12)


def test_equal_indices_are_diagonal():
    d = 12
    for m in (1, 2, 3):
        p = MonomialParams(m, m)
        for op in (fock.effective_hamiltonian(p, d), fock.symmetrized_hamiltonian(p, d)):
            assert np.allclose(op, np.diag(np.diag(op)))


def test_hamiltonian_needs_room():
    with pytest.raises(InvalidDimensionError):
        fock.symmetrized_hamiltonian(MonomialParams(1, 3), 3)


def test_monomial_params_validation():
    with pytest.raises(ValueError):
        MonomialParams(2, 1)
    with pytest.raises(ValueError):
        MonomialParams(0, 0)


def test_displacement_examples():
    assert np.allclose(fock.displacement(0, 6), np.eye(6))
    D = fock.displacement(1.0, 30)
    assert D[0, 0].real == pytest.approx(0.6065306597126334, abs=1e-12)
    psi = fock.displacement(0.5, 20)[:, 0]
    assert np.allclose(psi, fock.coherent_state(0.5, 20), atol=1e-10)


def test_displacement_unitary_on_low_levels():
    D = fock.displacement(1.2 - 0.7j, 40)
    assert np.allclose((D.conj().T @ D)[:15, :15], np.eye(15), atol=1e-10)


def test_displacement_tail_warning():
    with pytest.warns(TruncationWarning):
        fock.displacement(3.0, 10)


def test_parity():
    P = fock.parity(5)
    assert np.allclose(P @ fock.fock_state(2, 5), fock.fock_state(2, 5))
    assert np.allclose(P @ P, np.eye(5))
    assert np.trace(P) == 1
    assert np.trace(fock.parity(6)) == 0


def test_state_prep_examples():
    assert np.allclose(fock.state_prep("fock", 4, n=0), [1, 0, 0, 0])
    low = fock.state_prep("low_excited", 5, alpha=0.3)
    assert low[:2].real == pytest.approx([0.9578262852211513, 0.2873478855663454], abs=1e-12)
    coh = fock.state_prep("coherent", 20, alpha=1.0)
    assert coh[2].real == pytest.approx(math.exp(-0.5) / math.sqrt(2), abs=1e-10)
    with pytest.raises(InvalidDimensionError):
        fock.state_prep("fock", 4, n=4)


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False))
def test_coherent_states_are_normalized(alpha):
    assert np.linalg.norm(fock.coherent_state(alpha, 30)) == pytest.approx(1.0, abs=1e-12)


def test_truncation_guard():
    fock.check_truncation(fock.density(fock.coherent_state(1.0, 20)))
    with pytest.raises(TruncationError):
        fock.check_truncation(fock.density(fock.fock_state(5, 6)))
    assert fock.max_populated_level(fock.density(fock.fock_state(3, 8))) == 3
