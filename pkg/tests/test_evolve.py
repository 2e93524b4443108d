import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from densecoding.evolve import (
    amplitude_ck,
    array_to_two_mode,
    evolve_closed_form,
    evolve_matrix_exp,
    evolve_two_mode,
    transfer_probability,
    two_mode_to_array,
)
from densecoding.model import BasisState, Kind, SystemParams, basis_index, basis_size, basis_vector, frame_phases


def _fock_hamiltonian(m):
    """J (a1^dag a2 + a1 a2^dag) on |m-n, n>, built from ladder-operator matrix elements."""
    h = np.zeros((m + 1, m + 1))
    for n in range(m):
        h[n + 1, n] = h[n, n + 1] = math.sqrt((m - n) * (n + 1))
    return h


def test_ck_n1_quarter_period():
    assert amplitude_ck(1, 1, math.pi / 4) == pytest.approx(-1j / math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 40])
def test_ck_endpoint_at_transfer_time(n):
    assert amplitude_ck(n, n + 1, math.pi / 2) == pytest.approx((-1j) ** (n + 1), abs=1e-12)


def test_ck_normalized():
    total = sum(abs(amplitude_ck(5, k, 0.7)) ** 2 for k in range(7))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_ck_large_n_no_overflow():
    total = sum(abs(amplitude_ck(170, k, 0.3)) ** 2 for k in range(172))
    assert total == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        amplitude_ck(171, 0, 0.3)
    with pytest.raises(ValueError):
        amplitude_ck(3, 5, 0.3)


def test_transfer_probability_values():
    assert transfer_probability(6, math.pi / 2) == pytest.approx(1.0)
    assert transfer_probability(6, 0.0) == 0.0
    assert transfer_probability(1, math.pi / 4) == pytest.approx(0.25)


@given(st.integers(1, 20), st.floats(0.0, math.pi))
def test_transfer_probability_mirror(n, jt):
    assert transfer_probability(n, math.pi - jt) == pytest.approx(transfer_probability(n, jt), abs=1e-12)


def test_closed_form_transfer_time():
    p = SystemParams(5, 1.3, omega=7.0, omega_q3=2.0)
    psi = evolve_closed_form(p, basis_vector(5, BasisState(Kind.Q1_EXCITED)), p.transfer_time)
    expected = (-1j) ** 6 * np.exp(-1j * p.omega * p.transfer_time)
    assert psi[basis_index(5, BasisState(Kind.Q2_EXCITED))] == pytest.approx(expected, abs=1e-12)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_t_zero_is_identity():
    p = SystemParams(3, 1.0, omega=4.0, omega_q3=8.0)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=basis_size(3)) + 1j * rng.normal(size=basis_size(3))
    psi /= np.linalg.norm(psi)
    assert np.allclose(evolve_matrix_exp(p, psi, 0.0), psi, atol=1e-14)
    end_support = psi.copy()
    end_support[[1, 2, 3, 7, 8, 9]] = 0
    assert np.allclose(evolve_closed_form(p, end_support, 0.0), end_support, atol=1e-14)
    amps = psi[:6] / np.linalg.norm(psi[:6])
    assert np.allclose(evolve_two_mode(5, amps, 0.0), amps, atol=1e-14)


def test_closed_form_vs_matrix_exp_n3():
    p = SystemParams(3, 1.0)
    psi0 = basis_vector(3, BasisState(Kind.Q1_EXCITED))
    assert np.allclose(evolve_closed_form(p, psi0, 0.3), evolve_matrix_exp(p, psi0, 0.3), atol=1e-10)


def test_closed_form_rejects_non_engineered():
    p = SystemParams(3, 1.0, g=1.5)
    with pytest.raises(ValueError):
        evolve_closed_form(p, basis_vector(3, BasisState(Kind.Q1_EXCITED)), 0.1)
    with pytest.raises(ValueError):
        evolve_closed_form(SystemParams(3, 1.0), basis_vector(3, BasisState(Kind.PHOTON, 0, 2)), 0.1)


def test_matrix_exp_unitary_long_times():
    p = SystemParams(6, 1.0, omega=3.0, omega_q3=4.0, inter_cavity=(1.0, 2.0, 0.5, 3.0, 1.1))
    rng = np.random.default_rng(7)
    psi = rng.normal(size=basis_size(6)) + 1j * rng.normal(size=basis_size(6))
    psi /= np.linalg.norm(psi)
    for t in np.linspace(0, 10 * math.pi, 41):
        assert abs(np.linalg.norm(evolve_matrix_exp(p, psi, t)) - 1) < 1e-12


def test_matrix_exp_against_scipy_expm():
    p = SystemParams(4, 1.0, g=1.7, inter_cavity=(0.9, 2.2, 1.4), cavity_detuning=(0.1, -0.3, 0.2, 0.0))
    from densecoding.model import build_hamiltonian

    psi0 = basis_vector(4, BasisState(Kind.Q1_EXCITED, 1))
    ref = frame_phases(p, 2.3) * (expm(-1j * build_hamiltonian(p) * 2.3) @ psi0)
    assert np.allclose(evolve_matrix_exp(p, psi0, 2.3), ref, atol=1e-12)


def test_two_mode_from_end_gives_ck():
    m = 7
    start = np.zeros(m + 1, complex)
    start[0] = 1
    out = evolve_two_mode(m, start, 0.9)
    assert np.allclose(out, [amplitude_ck(m - 1, k, 0.9) for k in range(m + 1)], atol=1e-13)


def test_two_mode_hong_ou_mandel():
    out = evolve_two_mode(2, np.array([0, 1, 0], complex), math.pi / 4)
    assert abs(out[1]) < 1e-15
    assert abs(out[0]) ** 2 == pytest.approx(0.5) and abs(out[2]) ** 2 == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.floats(-10.0, 10.0), st.integers(0, 2**31))
def test_two_mode_against_fock_expm(m, jt, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
    psi /= np.linalg.norm(psi)
    ref = expm(-1j * _fock_hamiltonian(m) * jt) @ psi
    out = evolve_two_mode(m, psi, jt)
    assert np.allclose(out, ref, atol=1e-10)
    assert abs(np.linalg.norm(out) - 1) < 1e-10


@pytest.mark.parametrize("n", range(1, 9))
def test_duality_array_vs_two_mode(n):
    p = SystemParams(n, 1.0)
    rng = np.random.default_rng(n)
    psi0 = basis_vector(n, BasisState(Kind.Q1_EXCITED))
    start = array_to_two_mode(p, psi0)
    for jt in rng.uniform(0, 4 * math.pi, 50):
        array = array_to_two_mode(p, evolve_closed_form(p, psi0, jt))
        dual = evolve_two_mode(n + 1, start, jt)
        assert np.allclose(array, dual, atol=1e-10)


def test_two_mode_mapping_roundtrip():
    p = SystemParams(3, 1.0)
    amps = np.arange(5) + 1j
    assert np.array_equal(array_to_two_mode(p, two_mode_to_array(p, amps, q3=1), q3=1), amps)


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_revival_at_pi(n):
    p = SystemParams(n, 1.0)
    psi0 = basis_vector(n, BasisState(Kind.Q1_EXCITED))
    out = evolve_closed_form(p, psi0, math.pi)
    assert abs(abs(out[0]) - 1) < 1e-12


def test_q2_start_is_mirror_of_q1_start():
    p = SystemParams(4, 1.0)
    from_q2 = evolve_closed_form(p, basis_vector(4, BasisState(Kind.Q2_EXCITED, 1)), 0.8)
    ref = evolve_matrix_exp(p, basis_vector(4, BasisState(Kind.Q2_EXCITED, 1)), 0.8)
    assert np.allclose(from_q2, ref, atol=1e-12)
