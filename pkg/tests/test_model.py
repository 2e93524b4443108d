import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densecoding.model import (
    BasisState,
    Kind,
    SystemParams,
    basis_index,
    basis_size,
    basis_state,
    build_hamiltonian,
    default_couplings,
    excited_block,
    frame_phase,
    frame_phases,
)


def test_default_couplings_n4():
    g, links = default_couplings(4, 1.0)
    assert g == math.sqrt(5)
    assert links == pytest.approx((math.sqrt(8), 3.0, math.sqrt(8)), abs=1e-15)


def test_default_couplings_single_cavity():
    g, links = default_couplings(1, 1.0)
    assert g == math.sqrt(2)
    assert links == ()


def test_default_couplings_photonic_crystal_g():
    g, _ = default_couplings(10, 2 * math.pi * 7e9)
    assert g / (2 * math.pi) / 1e9 == pytest.approx(23.21, abs=0.01)


@pytest.mark.parametrize("n, j", [(0, 1.0), (3, 0.0), (3, -1.0), (2.5, 1.0)])
def test_default_couplings_rejects(n, j):
    with pytest.raises(ValueError):
        default_couplings(n, j)


@given(st.integers(1, 60))
def test_couplings_mirror_symmetric(n):
    _, links = default_couplings(n, 1.0)
    assert links == tuple(reversed(links))


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(3, 1.0, inter_cavity=(1.0,))
    with pytest.raises(ValueError):
        SystemParams(3, 1.0, g=-1.0)
    with pytest.raises(ValueError):
        SystemParams(3, 1.0, omega=-2.0)
    assert SystemParams(3, 1.0).engineered
    assert not SystemParams(3, 1.0, g=2.5).engineered


@given(st.integers(1, 12))
def test_basis_roundtrip(n):
    assert basis_size(n) == 2 * (n + 3)
    for i in range(basis_size(n)):
        assert basis_index(n, basis_state(n, i)) == i


def test_basis_order_documented():
    n = 2
    order = [basis_state(n, i) for i in range(basis_size(n))]
    assert order[:5] == [
        BasisState(Kind.Q1_EXCITED, 0),
        BasisState(Kind.PHOTON, 0, 1),
        BasisState(Kind.PHOTON, 0, 2),
        BasisState(Kind.Q2_EXCITED, 0),
        BasisState(Kind.GROUND, 0),
    ]
    assert all(s.q3 == 1 for s in order[5:])


def test_hamiltonian_n1():
    s2 = math.sqrt(2)
    expected = np.array([[0, s2, 0], [s2, 0, s2], [0, s2, 0]])
    assert np.allclose(excited_block(SystemParams(1, 1.0)), expected, atol=1e-15)


def test_hamiltonian_n4_offdiagonal():
    h = excited_block(SystemParams(4, 1.0))
    expected = [math.sqrt(5), math.sqrt(8), 3.0, math.sqrt(8), math.sqrt(5)]
    assert np.allclose(np.diag(h, 1), expected, atol=1e-15)
    assert np.count_nonzero(np.triu(h, 2)) == 0


@settings(max_examples=40)
@given(
    st.integers(1, 10),
    st.lists(st.floats(0.1, 5.0), min_size=11, max_size=11),
    st.lists(st.floats(-3.0, 3.0), min_size=10, max_size=10),
)
def test_hamiltonian_structure(n, couplings, detuning):
    params = SystemParams(
        n, 1.0, g=couplings[0], inter_cavity=couplings[1:n], g2=couplings[-1],
        cavity_detuning=detuning[:n],
    )
    h = build_hamiltonian(params)
    size = n + 3
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12 * np.max(np.abs(h))
    assert np.array_equal(h[:size, :size], h[size:, size:])
    assert not h[:size, size:].any() and not h[size:, :size].any()
    for ground in (size - 1, 2 * size - 1):
        assert not h[ground].any() and not h[:, ground].any()


@given(st.integers(1, 30))
def test_spectrum_symmetric(n):
    evals = np.linalg.eigvalsh(excited_block(SystemParams(n, 1.0)))
    assert np.allclose(evals, -evals[::-1], atol=1e-10)
    # engineered chain: equally spaced levels 2k - (N+1)
    assert np.allclose(evals, np.arange(-(n + 1), n + 2, 2), atol=1e-10)


def test_frame_phase_ground_is_one():
    p = SystemParams(3, 1.0, omega=17.3, omega_q3=2.1)
    assert frame_phase(p, 12.7, BasisState(Kind.GROUND, 0)) == 1


@pytest.mark.parametrize("n, nn, m", [(4, 2500, 2500), (10, 250, 250), (1, 1, 0), (3, 7, 2)])
def test_frame_phase_cancellation(n, nn, m):
    p = SystemParams(n, 1.0, omega=4 * nn - (n + 1), omega_q3=4 * m)
    ph = frame_phase(p, p.transfer_time, BasisState(Kind.Q1_EXCITED, 1))
    assert abs(ph - 1j ** (n + 1)) < 1e-9


def test_frame_phase_photon():
    p = SystemParams(3, 1.0, omega=5.0, omega_q3=9.0)
    assert frame_phase(p, 0.4, BasisState(Kind.PHOTON, 0, 2)) == pytest.approx(np.exp(-2j))


def test_frame_phases_vector_matches_scalar():
    p = SystemParams(3, 1.0, omega=5.0, omega_q3=9.0)
    vec = frame_phases(p, 0.37)
    for i in range(basis_size(3)):
        assert vec[i] == pytest.approx(frame_phase(p, 0.37, basis_state(3, i)), abs=1e-14)
