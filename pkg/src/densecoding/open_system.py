"""Lindblad evolution of the protocol with cavity and atomic decay.

Works in the interaction picture: every jump operator only picks up a phase
under the free rotation, so the dissipators are unchanged and the frame
phases are put back on at the end.  The truncated basis is closed under the
Hamiltonian and under all lowering operators, so nothing is approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .model import BasisState, Kind, SystemParams, basis_index, basis_size, build_hamiltonian, frame_phases
from .protocol import ALL_BITS, ClassicalBits, _bits, encode, initial_state, target_state

__all__ = [
    "ConvergenceError",
    "DecayRates",
    "jump_operators",
    "lindblad_rhs",
    "integrate",
    "dissipative_fidelity",
    "dissipative_fidelities",
]


class ConvergenceError(RuntimeError):
    """Step halving did not reach the requested tolerance."""


@dataclass(frozen=True)
class DecayRates:
    """Uniform cavity decay ``kappa`` and atomic decay ``gamma`` (rad/time)."""

    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")


def jump_operators(params: SystemParams, rates: DecayRates) -> tuple[np.ndarray, np.ndarray]:
    """Lowering operators and their rates.

    Returns ``(ops, weights)`` with ``ops`` of shape (M, d, d) so that the
    dissipator is ``sum_i w_i (c_i rho c_i^dag - {c_i^dag c_i, rho} / 2)``.
    Zero-rate channels are dropped.
    """
    n = params.n_cavities
    d = basis_size(n)
    ops, weights = [], []

    def lower(source: Kind, site: int = 0) -> np.ndarray:
        c = np.zeros((d, d))
        for q3 in (0, 1):
            src = basis_index(n, BasisState(source, q3, site))
            dst = basis_index(n, BasisState(Kind.GROUND, q3))
            c[dst, src] = 1.0
        return c

    if rates.kappa > 0:
        for j in range(1, n + 1):
            ops.append(lower(Kind.PHOTON, j))
            weights.append(rates.kappa)
    if rates.gamma > 0:
        ops.append(lower(Kind.Q1_EXCITED))
        ops.append(lower(Kind.Q2_EXCITED))
        q3 = np.zeros((d, d))
        half = d // 2
        q3[np.arange(half), np.arange(half) + half] = 1.0
        ops.append(q3)
        weights.extend([rates.gamma] * 3)
    if not ops:
        return np.zeros((0, d, d), dtype=complex), np.zeros(0)
    return np.array(ops, dtype=complex), np.array(weights)


class _Generator:
    """Lindblad right-hand side for a fixed Hamiltonian and rates.

    The coherent and anticommutator parts go through an effective
    non-Hermitian Hamiltonian.  Every jump operator here is a partial
    permutation, so the recycling term ``sum_i w_i c_i rho c_i^dag`` is applied
    as a sparse map on the flattened density matrix.
    """

    def __init__(self, params: SystemParams, rates: DecayRates):
        h = build_hamiltonian(params)
        ops, w = jump_operators(params, rates)
        d = h.shape[0]
        self.dim = d
        loss = np.einsum("i,ijk->jk", w, ops.conj().transpose(0, 2, 1) @ ops) if len(w) else np.zeros_like(h)
        self.h_eff = h - 0.5j * loss
        self.h_eff_dag = self.h_eff.conj().T
        rows, cols, vals = [], [], []
        for c, rate in zip(ops, w):
            dst, src = np.nonzero(c)
            amp = c[dst, src]
            rows.append((dst[:, None] * d + dst[None, :]).ravel())
            cols.append((src[:, None] * d + src[None, :]).ravel())
            vals.append((rate * amp[:, None] * amp.conj()[None, :]).ravel())
        self.recycle = None
        if rows:
            self.recycle = sparse.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(d * d, d * d)
            )
        self.scale = float(np.max(np.abs(np.linalg.eigvalsh(h)))) + float(w.sum())

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = -1j * (self.h_eff @ rho - rho @ self.h_eff_dag)
        if self.recycle is not None:
            d = self.dim
            flat = rho.reshape(-1, d * d)
            out = out + (self.recycle @ flat.T).T.reshape(rho.shape)
        return out


def lindblad_rhs(params: SystemParams, rates: DecayRates, rho: np.ndarray) -> np.ndarray:
    """d rho / dt in the interaction picture.

    ``-i[H, rho] + (kappa/2) sum_j L[a_j] rho + (gamma/2) sum_q L[sigma_q] rho``
    with ``L[o] rho = 2 o rho o^dag - o^dag o rho - rho o^dag o``.
    """
    return _Generator(params, rates)(np.asarray(rho, dtype=complex))


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + np.swapaxes(rho, -1, -2).conj())


def _rk4(gen: _Generator, rho: np.ndarray, t: float, steps: int) -> np.ndarray:
    h = t / steps
    for _ in range(steps):
        k1 = gen(rho)
        k2 = gen(rho + 0.5 * h * k1)
        k3 = gen(rho + 0.5 * h * k2)
        k4 = gen(rho + h * k3)
        rho = _hermitize(rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
    return rho


def integrate(
    params: SystemParams,
    rates: DecayRates,
    rho0: np.ndarray,
    t: float,
    tol: float = 1e-9,
    max_steps: int = 1 << 18,
) -> np.ndarray:
    """Fixed-step RK4 from 0 to ``t``, halving the step until converged.

    The error of the step-h/2 result is estimated as ``|rho_h/2 - rho_h| / 15``
    (RK4 is fourth order); once its max-norm drops below ``tol`` the finer
    result is returned.  ``rho0`` may be a stack of
    density matrices with leading batch axes.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    gen = _Generator(params, rates)
    steps = max(4, math.ceil(t * gen.scale / 0.2))
    coarse = _rk4(gen, rho0, t, steps)
    while steps <= max_steps:
        steps *= 2
        fine = _rk4(gen, rho0, t, steps)
        if np.max(np.abs(fine - coarse)) / 15.0 < tol:
            return fine
        coarse = fine
    raise ConvergenceError(f"RK4 did not converge to {tol:g} within {max_steps} steps")


def _encoded_density(params: SystemParams, bits) -> np.ndarray:
    psi = encode(initial_state(params), bits)
    return np.outer(psi, psi.conj())


def dissipative_fidelities(params: SystemParams, rates: DecayRates, tol: float = 1e-9) -> dict[ClassicalBits, float]:
    """Mixed-state fidelities <target|rho(T)|target> for all four bit pairs."""
    t = params.transfer_time
    rho0 = np.stack([_encoded_density(params, b) for b in ALL_BITS])
    rho_t = integrate(params, rates, rho0, t, tol=tol)
    phases = frame_phases(params, t)
    out = {}
    for bits, rho in zip(ALL_BITS, rho_t):
        # back to the lab frame; the targets are lab-frame states at T
        lab = phases[:, None] * rho * phases.conj()[None, :]
        target = target_state(bits, params.n_cavities)
        out[bits] = float(np.vdot(target, lab @ target).real)
    return out


def dissipative_fidelity(params: SystemParams, rates: DecayRates, bits, tol: float = 1e-9) -> float:
    bits = _bits(bits)
    t = params.transfer_time
    rho_t = integrate(params, rates, _encoded_density(params, bits), t, tol=tol)
    phases = frame_phases(params, t)
    lab = phases[:, None] * rho_t * phases.conj()[None, :]
    target = target_state(bits, params.n_cavities)
    return float(np.vdot(target, lab @ target).real)
