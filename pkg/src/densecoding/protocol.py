"""Dense coding through the cavity array.

Pipeline for one pair of classical bits::

    initial_state -> encode (Pauli on q1) -> evolve to T = pi/2J
                  -> compare with target_state -> decode (CNOT, Hadamard)

Bits are indexed in table order ``(0,0), (1,0), (0,1), (1,1)`` which are the
fidelities F1..F4.  Decoded bits read ``x`` from q2 and ``y`` from q3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .evolve import evolve_closed_form, evolve_matrix_exp
from .model import (
    BasisState,
    Kind,
    SystemParams,
    basis_index,
    basis_size,
    basis_state,
    sector_size,
)

LEAKAGE_TOL = 1e-6
PHASE_TOL = 1e-9


class ClassicalBits(NamedTuple):
    x: int
    y: int


ALL_BITS: tuple[ClassicalBits, ...] = (
    ClassicalBits(0, 0),
    ClassicalBits(1, 0),
    ClassicalBits(0, 1),
    ClassicalBits(1, 1),
)

ENGINES: dict[str, Callable[[SystemParams, np.ndarray, float], np.ndarray]] = {
    "closed_form": evolve_closed_form,
    "matrix_exp": evolve_matrix_exp,
}


def _bits(bits) -> ClassicalBits:
    b = ClassicalBits(*bits)
    if b not in ALL_BITS:
        raise ValueError(f"bits must be a pair of 0/1 values, got {bits}")
    return b


def _n_from_state(state: np.ndarray) -> int:
    size = np.asarray(state).shape[0]
    n = size // 2 - 3
    if n < 1 or basis_size(n) != size:
        raise ValueError(f"state dimension {size} does not match any array size")
    return n


def _idx(n: int, kind: Kind, q3: int) -> int:
    return basis_index(n, BasisState(kind, q3))


def initial_state(params: SystemParams) -> np.ndarray:
    """q1 and q3 share ``(|g g> + |e e>)/sqrt2``; array and q2 empty."""
    n = params.n_cavities
    psi = np.zeros(basis_size(n), dtype=complex)
    psi[_idx(n, Kind.GROUND, 0)] = 1 / math.sqrt(2)
    psi[_idx(n, Kind.Q1_EXCITED, 1)] = 1 / math.sqrt(2)
    return psi


def apply_sigma_z(state: np.ndarray) -> np.ndarray:
    """sigma_z on q1: +1 on Q1Excited, -1 on every q1-ground state."""
    n = _n_from_state(state)
    sign = -np.ones(basis_size(n))
    sign[[_idx(n, Kind.Q1_EXCITED, 0), _idx(n, Kind.Q1_EXCITED, 1)]] = 1.0
    return sign * np.asarray(state, dtype=complex)


def apply_sigma_x(state: np.ndarray) -> np.ndarray:
    """sigma_x on q1; swaps ArrayGround and Q1Excited in each q3 block."""
    state = np.asarray(state, dtype=complex)
    n = _n_from_state(state)
    size = sector_size(n)
    mid = np.r_[1 : n + 2, size + 1 : size + n + 2]
    if np.any(np.abs(state[mid]) > 0):
        raise ValueError("sigma_x on q1 is undefined while the excitation is in the array")
    out = state.copy()
    for q3 in (0, 1):
        g, e = _idx(n, Kind.GROUND, q3), _idx(n, Kind.Q1_EXCITED, q3)
        out[g], out[e] = state[e], state[g]
    return out


def encode(state: np.ndarray, bits) -> np.ndarray:
    """Alice's Pauli encoding: I, sigma_z, sigma_x or sigma_x sigma_z."""
    x, y = _bits(bits)
    out = np.asarray(state, dtype=complex)
    if x:
        out = apply_sigma_z(out)
    if y:
        out = apply_sigma_x(out)
    return out


@dataclass(frozen=True)
class PhaseCondition:
    """Result of checking omega/J = 4n - (N+1) and omega_q3/J = 4m.

    ``n`` and ``m`` are the nearest integers; ``compliant`` says whether both
    relations hold to ``PHASE_TOL``.  ``physical`` is False when the nearest
    compliant omega would be negative, in which case ``nearest_omega_over_j``
    is the smallest non-negative compliant value instead.
    """

    n: int
    m: int
    compliant: bool
    physical: bool
    nearest_omega_over_j: float
    nearest_omega_q3_over_j: float


def check_phase_condition(n_cavities: int, omega_over_j: float, omega_q3_over_j: float) -> PhaseCondition:
    shift = n_cavities + 1
    n = round((omega_over_j + shift) / 4)
    m = round(omega_q3_over_j / 4)
    ok_n = abs(omega_over_j + shift - 4 * n) < PHASE_TOL
    ok_m = abs(omega_q3_over_j - 4 * m) < PHASE_TOL
    nearest_w = 4 * n - shift
    physical = nearest_w >= 0 and omega_over_j >= -PHASE_TOL
    if nearest_w < 0:
        nearest_w = 4 * math.ceil(shift / 4) - shift
    nearest_q3 = 4 * max(m, 0)
    return PhaseCondition(
        n=n,
        m=m,
        compliant=ok_n and ok_m,
        physical=physical,
        nearest_omega_over_j=float(nearest_w),
        nearest_omega_q3_over_j=float(nearest_q3),
    )


def phase_condition(params: SystemParams) -> PhaseCondition:
    return check_phase_condition(
        params.n_cavities, params.omega / params.j_unit, params.omega_q3 / params.j_unit
    )


def snap_to_phase_condition(params: SystemParams) -> SystemParams:
    """Move omega and omega_q3 to the nearest compliant values."""
    pc = phase_condition(params)
    return replace(
        params,
        omega=pc.nearest_omega_over_j * params.j_unit,
        omega_q3=pc.nearest_omega_q3_over_j * params.j_unit,
    )


def _target_components(bits: ClassicalBits) -> tuple[tuple[Kind, int, float], ...]:
    r = 1 / math.sqrt(2)
    return {
        (0, 0): ((Kind.GROUND, 0, r), (Kind.Q2_EXCITED, 1, r)),
        (1, 0): ((Kind.Q2_EXCITED, 1, r), (Kind.GROUND, 0, -r)),
        (0, 1): ((Kind.Q2_EXCITED, 0, r), (Kind.GROUND, 1, r)),
        (1, 1): ((Kind.GROUND, 1, r), (Kind.Q2_EXCITED, 0, -r)),
    }[tuple(bits)]


def target_state(bits, n_cavities: int) -> np.ndarray:
    """Ideal (q2, q3) Bell-like state at T with q1 ground and the array empty."""
    psi = np.zeros(basis_size(n_cavities), dtype=complex)
    for kind, q3, amp in _target_components(_bits(bits)):
        psi[_idx(n_cavities, kind, q3)] = amp
    return psi


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_HADAMARD_Q2 = np.kron(np.array([[1, 1], [1, -1]]) / math.sqrt(2), np.eye(2))
DECODER = _HADAMARD_Q2 @ _CNOT


@dataclass(frozen=True)
class DecodeResult:
    """Bob's readout on (q2, q3), ordered |gg>, |ge>, |eg>, |ee>."""

    state: np.ndarray
    probabilities: dict[ClassicalBits, float]
    leakage: float

    @property
    def leaked(self) -> bool:
        return self.leakage > LEAKAGE_TOL

    def most_likely(self) -> ClassicalBits:
        return max(self.probabilities, key=self.probabilities.get)


def _bob_indices(n: int) -> list[int]:
    return [
        _idx(n, Kind.GROUND, 0),
        _idx(n, Kind.GROUND, 1),
        _idx(n, Kind.Q2_EXCITED, 0),
        _idx(n, Kind.Q2_EXCITED, 1),
    ]


def _readout(diag: np.ndarray) -> dict[ClassicalBits, float]:
    p = np.clip(diag.real, 0.0, None)
    p = p / p.sum()
    return {ClassicalBits(q2, q3): float(p[2 * q2 + q3]) for q2 in (0, 1) for q3 in (0, 1)}


def decode(state: np.ndarray) -> DecodeResult:
    """CNOT (q2 controls q3) then Hadamard on q2, measured in the g/e basis.

    Accepts a state vector or a density matrix.  Any population left on q1
    or in the cavities is reported as ``leakage`` and the remainder is
    renormalised before readout.
    """
    state = np.asarray(state, dtype=complex)
    n = _n_from_state(state)
    idx = _bob_indices(n)
    if state.ndim == 1:
        total = float(np.vdot(state, state).real)
        sub = state[idx]
        kept = float(np.vdot(sub, sub).real)
        if kept == 0:
            raise ValueError("state has no support on Bob's qubits")
        out = DECODER @ (sub / math.sqrt(kept))
        probs = _readout(np.abs(out) ** 2)
    else:
        total = float(np.trace(state).real)
        sub = state[np.ix_(idx, idx)]
        kept = float(np.trace(sub).real)
        if kept <= 0:
            raise ValueError("state has no support on Bob's qubits")
        out = DECODER @ (sub / kept) @ DECODER.conj().T
        probs = _readout(np.diag(out))
    return DecodeResult(state=out, probabilities=probs, leakage=max(0.0, 1.0 - kept / total))


@dataclass(frozen=True)
class ProtocolResult:
    bits: ClassicalBits
    fidelity: float
    decoded_probabilities: dict[ClassicalBits, float]
    leakage: float
    residual_phase: float

    @property
    def success_probability(self) -> float:
        return self.decoded_probabilities[self.bits]


def _branch_phase(psi: np.ndarray, bits: ClassicalBits, n: int) -> float:
    """Relative phase between the two target branches left in ``psi``.

    Zero when the evolved state carries exactly the target's relative sign;
    the global phase drops out.
    """
    (k0, q0, a0), (k1, q1, a1) = _target_components(bits)
    c0 = psi[_idx(n, k0, q0)] / a0
    c1 = psi[_idx(n, k1, q1)] / a1
    if abs(c0) == 0 or abs(c1) == 0:
        return float("nan")
    return float(np.angle(c1 * np.conj(c0)))


def evolve_encoded(params: SystemParams, bits, t: float, engine: str = "matrix_exp") -> np.ndarray:
    try:
        step = ENGINES[engine]
    except KeyError:
        raise ValueError(f"unknown engine {engine!r}; choose from {sorted(ENGINES)}") from None
    return step(params, encode(initial_state(params), bits), t)


def run_protocol(params: SystemParams, bits, engine: str = "matrix_exp") -> ProtocolResult:
    """Encode, transfer for T = pi/2J, score against the target and decode."""
    bits = _bits(bits)
    n = params.n_cavities
    psi_t = evolve_encoded(params, bits, params.transfer_time, engine)
    fid = abs(np.vdot(target_state(bits, n), psi_t)) ** 2
    readout = decode(psi_t)
    return ProtocolResult(
        bits=bits,
        fidelity=float(fid),
        decoded_probabilities=readout.probabilities,
        leakage=readout.leakage,
        residual_phase=_branch_phase(psi_t, bits, n),
    )


def fidelity_curve(params: SystemParams, jt: np.ndarray, engine: str = "matrix_exp") -> np.ndarray:
    """F1..F4 against the fixed T targets for each time J t in ``jt``.

    Returns an array of shape ``(len(jt), 4)``.
    """
    n = params.n_cavities
    jt = np.atleast_1d(np.asarray(jt, dtype=float))
    out = np.empty((jt.size, 4))
    for j, bits in enumerate(ALL_BITS):
        target = target_state(bits, n)
        for i, x in enumerate(jt):
            psi = evolve_encoded(params, bits, x / params.j_unit, engine)
            out[i, j] = abs(np.vdot(target, psi)) ** 2
    return out


# two-qubit reductions and concurrence

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _labels(n: int, index: int) -> dict[str, int]:
    s = basis_state(n, index)
    return {
        "q1": int(s.kind is Kind.Q1_EXCITED),
        "q2": int(s.kind is Kind.Q2_EXCITED),
        "q3": s.q3,
        "photon": s.site,
    }


def pair_amplitudes(psi: np.ndarray, pair: tuple[str, str] = ("q1", "q3")) -> np.ndarray:
    """Reshape a pure state into a 4 x d_env matrix for the qubit ``pair``.

    Row ``2a + b`` holds the amplitudes with the first qubit in ``a`` and the
    second in ``b``; columns run over configurations of everything else.
    """
    psi = np.asarray(psi, dtype=complex)
    n = _n_from_state(psi)
    a, b = pair
    envs: dict[tuple, int] = {}
    entries = []
    for i, amp in enumerate(psi):
        lab = _labels(n, i)
        env = tuple(v for k, v in sorted(lab.items()) if k not in pair)
        col = envs.setdefault(env, len(envs))
        entries.append((2 * lab[a] + lab[b], col, amp))
    mat = np.zeros((4, len(envs)), dtype=complex)
    for row, col, amp in entries:
        mat[row, col] += amp
    return mat


def reduced_pair(state: np.ndarray, pair: tuple[str, str] = ("q1", "q3")) -> np.ndarray:
    """Two-qubit reduced density matrix of a state vector or density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        m = pair_amplitudes(state, pair)
        return m @ m.conj().T
    n = _n_from_state(state)
    a, b = pair
    rows, envs = [], []
    for i in range(state.shape[0]):
        lab = _labels(n, i)
        rows.append(2 * lab[a] + lab[b])
        envs.append(tuple(v for k, v in sorted(lab.items()) if k not in pair))
    red = np.zeros((4, 4), dtype=complex)
    for i in range(state.shape[0]):
        for j in range(state.shape[0]):
            if envs[i] == envs[j]:
                red[rows[i], rows[j]] += state[i, j]
    return red


def _concurrence_tau(m: np.ndarray) -> float:
    # singular values of M^T (sy x sy) M are the Wootters lambdas for rho = M M^dag
    lam = np.linalg.svd(m.T @ _YY @ m, compute_uv=False)
    lam = np.sort(np.concatenate([lam, np.zeros(4)]))[::-1][:4]
    return float(max(0.0, lam[0] - lam[1:].sum()))


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a 4 x 4 two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    return _concurrence_tau(v * np.sqrt(np.clip(w, 0.0, None)))


def pair_concurrence(state: np.ndarray, pair: tuple[str, str] = ("q1", "q3")) -> float:
    """Concurrence of a qubit pair inside the full system.

    Pure states go through their amplitude matrix directly, which keeps the
    separable case at rounding level rather than at its square root.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return _concurrence_tau(pair_amplitudes(state, pair))
    return concurrence(reduced_pair(state, pair))
