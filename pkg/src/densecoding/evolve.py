"""Single-excitation evolution engines.

Three routes to the same propagator, kept independent so they can check each
other:

* :func:`evolve_closed_form` uses the binomial amplitudes ``C_k`` that hold
  for engineered couplings only;
* :func:`evolve_matrix_exp` diagonalises the interaction Hamiltonian and works
  for any couplings or detunings;
* :func:`evolve_two_mode` evolves the equivalent two-mode bosonic problem
  ``J (a1^dag a2 + a1 a2^dag)`` holding N+1 quanta.

State vectors are plain complex numpy arrays in the basis of
:mod:`densecoding.model`.  The first two engines return lab-frame states,
i.e. interaction-picture amplitudes times :func:`~densecoding.model.frame_phases`.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    SystemParams,
    basis_size,
    build_hamiltonian,
    frame_phases,
    sector_size,
)

MAX_CAVITIES = 170


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def amplitude_ck(n_cavities: int, k: int, jt: float) -> complex:
    """Amplitude of the k-th site after time jt / J, starting from q1.

    ``sqrt(binom(N+1, k)) * cos(jt)**(N+1-k) * (-i sin(jt))**k``; site 0 is q1,
    sites 1..N the cavities and site N+1 is q2.
    """
    if n_cavities > MAX_CAVITIES:
        raise ValueError(f"N capped at {MAX_CAVITIES}")
    m = n_cavities + 1
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, {m}], got {k}")
    c, s = math.cos(jt), math.sin(jt)
    weight = math.exp(0.5 * _log_binom(m, k))
    return weight * c ** (m - k) * (-1j * s) ** k


def transfer_probability(n_cavities: int, jt: float) -> float:
    """Probability that the q1 excitation sits on q2 after time jt / J."""
    return math.sin(jt) ** (2 * (n_cavities + 1))


def _closed_form_block(n_cavities: int, jt: float) -> np.ndarray:
    """Excited-block propagator columns for q1 and q2 initial excitations.

    Column 0 starts on q1; column 1 starts on q2 and is the mirror image of
    column 0 under chain reversal.
    """
    m = n_cavities + 1
    from_q1 = np.array([amplitude_ck(n_cavities, k, jt) for k in range(m + 1)])
    return np.stack([from_q1, from_q1[::-1]], axis=1)


def evolve_closed_form(params: SystemParams, initial: np.ndarray, t: float) -> np.ndarray:
    """Evolve using the closed-form amplitudes.

    Valid only for engineered couplings.  The initial state may have support
    on ArrayGround, Q1Excited and Q2Excited (either q3 level); an excitation
    starting inside the array has no closed form here and is rejected.
    """
    if not params.engineered:
        raise ValueError("closed form requires the engineered couplings and resonant cavities")
    n = params.n_cavities
    size = sector_size(n)
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (basis_size(n),):
        raise ValueError(f"state has shape {psi0.shape}, expected ({basis_size(n)},)")
    interior = np.r_[1 : n + 1, size + 1 : size + n + 1]
    if np.any(np.abs(psi0[interior]) > 0):
        raise ValueError("closed form covers ArrayGround, Q1Excited and Q2Excited initial support")

    cols = _closed_form_block(n, params.j_unit * t)
    out = np.zeros_like(psi0)
    for q3 in (0, 1):
        off = q3 * size
        out[off : off + n + 2] = cols @ psi0[[off, off + n + 1]]
        out[off + size - 1] = psi0[off + size - 1]
    return frame_phases(params, t) * out


def interaction_propagator(params: SystemParams, t: float) -> np.ndarray:
    """exp(-i H_int t) via the Hermitian eigendecomposition."""
    h = build_hamiltonian(params)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def evolve_matrix_exp(params: SystemParams, initial: np.ndarray, t: float) -> np.ndarray:
    """Brute-force evolution, any couplings; frame phases are reattached."""
    psi0 = np.asarray(initial, dtype=complex)
    return frame_phases(params, t) * (interaction_propagator(params, t) @ psi0)


def evolve_two_mode(n_quanta: int, initial: np.ndarray, jt: float) -> np.ndarray:
    """Beam-splitter evolution of two modes sharing ``n_quanta`` photons.

    ``initial[n]`` is the amplitude of ``|n_quanta - n, n>``.  Each Fock state
    is expanded through the binomial double sum obtained by rotating the
    creation operators ``a1^dag -> a1^dag cos - i a2^dag sin`` and
    ``a2^dag -> a2^dag cos - i a1^dag sin``.
    """
    m = int(n_quanta)
    if m - 1 > MAX_CAVITIES:
        raise ValueError(f"N capped at {MAX_CAVITIES}")
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (m + 1,):
        raise ValueError(f"two-mode state must have length {m + 1}")
    c, s = math.cos(jt), math.sin(jt)
    lf = [math.lgamma(i + 1) for i in range(m + 1)]
    out = np.zeros(m + 1, dtype=complex)
    for n, amp in enumerate(psi0):
        if amp == 0:
            continue
        for k in range(m - n + 1):
            for l in range(n + 1):
                p = n + k - l
                norm = math.exp(
                    _log_binom(m - n, k)
                    + _log_binom(n, l)
                    + 0.5 * (lf[m - p] + lf[p] - lf[m - n] - lf[n])
                )
                out[p] += amp * norm * c ** (m - k - l) * (-1j * s) ** (k + l)
    return out


def array_to_two_mode(params: SystemParams, psi: np.ndarray, q3: int = 0) -> np.ndarray:
    """Excited-sector amplitudes of one q3 block mapped onto ``|N+1-n, n>``.

    Q1Excited maps to n = 0, Photon(k) to n = k and Q2Excited to n = N+1.
    """
    n = params.n_cavities
    off = q3 * sector_size(n)
    return np.asarray(psi, dtype=complex)[off : off + n + 2].copy()


def two_mode_to_array(params: SystemParams, amps: np.ndarray, q3: int = 0) -> np.ndarray:
    n = params.n_cavities
    psi = np.zeros(basis_size(n), dtype=complex)
    off = q3 * sector_size(n)
    psi[off : off + n + 2] = amps
    return psi
