"""System parameters, basis enumeration and the interaction-picture Hamiltonian.

The simulated Hilbert space is the protocol sector of the cavity array: the
array holds at most one excitation (on q1, on one of the N cavities, or on q2)
and Bob's stored qubit q3 is a spectator two-level system.  Bob's extra cavity
never couples to anything and is left out.

Basis ordering is q3-major::

    index = q3 * (N + 3) + sector

with ``sector`` running over (Q1Excited, Photon(1), ..., Photon(N), Q2Excited,
ArrayGround).  The Hamiltonian is therefore literally ``kron(I_2, h)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Kind",
    "BasisState",
    "SystemParams",
    "default_couplings",
    "basis_size",
    "sector_size",
    "basis_index",
    "basis_state",
    "basis_vector",
    "build_hamiltonian",
    "frame_phase",
    "frame_phases",
]


class Kind(enum.Enum):
    Q1_EXCITED = "q1"
    PHOTON = "photon"
    Q2_EXCITED = "q2"
    GROUND = "ground"


@dataclass(frozen=True)
class BasisState:
    """One array configuration paired with a q3 level (0 = g, 1 = e)."""

    kind: Kind
    q3: int = 0
    site: int = 0  # cavity number 1..N, only meaningful for PHOTON

    def __post_init__(self):
        if self.q3 not in (0, 1):
            raise ValueError(f"q3 must be 0 or 1, got {self.q3}")
        if self.kind is Kind.PHOTON and self.site < 1:
            raise ValueError("photon site is 1-based")
        if self.kind is not Kind.PHOTON and self.site != 0:
            raise ValueError(f"{self.kind} takes no site")

    @property
    def array_excited(self) -> bool:
        return self.kind is not Kind.GROUND


def default_couplings(n_cavities: int, j_unit: float) -> tuple[float, tuple[float, ...]]:
    """Engineered couplings for perfect transfer at t = pi / (2 J).

    Returns ``(g, (J_1, ..., J_{N-1}))`` with ``g = sqrt(N+1) J`` and
    ``J_k = sqrt((k+1)(N+1-k)) J``.
    """
    if int(n_cavities) != n_cavities or n_cavities < 1:
        raise ValueError(f"n_cavities must be a positive integer, got {n_cavities}")
    if not j_unit > 0:
        raise ValueError(f"j_unit must be positive, got {j_unit}")
    n = int(n_cavities)
    g = math.sqrt(n + 1) * j_unit
    links = tuple(math.sqrt((k + 1) * (n + 1 - k)) * j_unit for k in range(1, n))
    return g, links


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the array, all as angular rates (hbar = 1).

    ``g`` and ``inter_cavity`` default to the engineered values.  ``g2`` is
    the q2-side atom-cavity coupling and follows ``g`` unless set; only
    coupling disorder sets it.
    ``cavity_detuning`` holds ``omega_j - omega`` per cavity and is empty when
    all cavities sit at ``omega``; it is only populated by frequency disorder.
    """

    n_cavities: int
    j_unit: float
    omega: float = 0.0
    omega_q3: float = 0.0
    g: float | None = None
    inter_cavity: tuple[float, ...] | None = None
    cavity_detuning: tuple[float, ...] = field(default=())
    g2: float | None = None

    def __post_init__(self):
        g0, links0 = default_couplings(self.n_cavities, self.j_unit)
        if self.omega < 0 or self.omega_q3 < 0:
            raise ValueError("resonance frequencies must be non-negative")
        if self.g is None:
            object.__setattr__(self, "g", g0)
        elif not self.g > 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.g2 is None:
            object.__setattr__(self, "g2", self.g)
        elif not self.g2 > 0:
            raise ValueError(f"g2 must be positive, got {self.g2}")
        if self.inter_cavity is None:
            object.__setattr__(self, "inter_cavity", links0)
        else:
            links = tuple(float(x) for x in self.inter_cavity)
            if len(links) != self.n_cavities - 1:
                raise ValueError(
                    f"expected {self.n_cavities - 1} inter-cavity couplings, got {len(links)}"
                )
            if any(not x > 0 for x in links):
                raise ValueError("inter-cavity couplings must be positive")
            object.__setattr__(self, "inter_cavity", links)
        detuning = tuple(float(x) for x in self.cavity_detuning)
        if detuning and len(detuning) != self.n_cavities:
            raise ValueError(f"expected {self.n_cavities} cavity detunings, got {len(detuning)}")
        object.__setattr__(self, "cavity_detuning", detuning)

    @property
    def transfer_time(self) -> float:
        """T = pi / (2 J)."""
        return math.pi / (2.0 * self.j_unit)

    @property
    def engineered(self) -> bool:
        """True when couplings are exactly the default formula and cavities are resonant."""
        g0, links0 = default_couplings(self.n_cavities, self.j_unit)
        return (
            self.g == g0
            and self.g2 == g0
            and self.inter_cavity == links0
            and not any(self.cavity_detuning)
        )


def sector_size(n_cavities: int) -> int:
    return n_cavities + 3


def basis_size(n_cavities: int) -> int:
    return 2 * sector_size(n_cavities)


def _sector_index(n: int, state: BasisState) -> int:
    if state.kind is Kind.Q1_EXCITED:
        return 0
    if state.kind is Kind.PHOTON:
        if state.site > n:
            raise ValueError(f"photon site {state.site} outside array of {n} cavities")
        return state.site
    if state.kind is Kind.Q2_EXCITED:
        return n + 1
    return n + 2


def basis_index(n_cavities: int, state: BasisState) -> int:
    return state.q3 * sector_size(n_cavities) + _sector_index(n_cavities, state)


def basis_state(n_cavities: int, index: int) -> BasisState:
    size = sector_size(n_cavities)
    if not 0 <= index < 2 * size:
        raise IndexError(f"basis index {index} out of range for N={n_cavities}")
    q3, sector = divmod(index, size)
    if sector == 0:
        return BasisState(Kind.Q1_EXCITED, q3)
    if sector <= n_cavities:
        return BasisState(Kind.PHOTON, q3, site=sector)
    if sector == n_cavities + 1:
        return BasisState(Kind.Q2_EXCITED, q3)
    return BasisState(Kind.GROUND, q3)


def basis_vector(n_cavities: int, state: BasisState) -> np.ndarray:
    psi = np.zeros(basis_size(n_cavities), dtype=complex)
    psi[basis_index(n_cavities, state)] = 1.0
    return psi


def excited_block(params: SystemParams) -> np.ndarray:
    """Hamiltonian on (Q1Excited, Photon(1..N), Q2Excited) for one q3 level."""
    n = params.n_cavities
    offdiag = np.array([params.g, *params.inter_cavity, params.g2], dtype=float)
    h = np.diag(offdiag, 1) + np.diag(offdiag, -1)
    if params.cavity_detuning:
        h[1 : n + 1, 1 : n + 1] += np.diag(params.cavity_detuning)
    return h.astype(complex)


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Interaction-picture Hamiltonian on the full 2(N+3) basis.

    For N = 1 and J = 1 the excited block is::

        [[0, sqrt2, 0], [sqrt2, 0, sqrt2], [0, sqrt2, 0]]

    The ArrayGround row and column are zero and q3 is untouched.
    """
    size = sector_size(params.n_cavities)
    block = np.zeros((size, size), dtype=complex)
    block[: size - 1, : size - 1] = excited_block(params)
    return np.kron(np.eye(2), block)


def frame_phase(params: SystemParams, t: float, state: BasisState) -> complex:
    """Lab-frame phase of ``state`` at time t relative to ArrayGround with q3 = g."""
    phase = 0.0
    if state.array_excited:
        phase += params.omega * t
    if state.q3:
        phase += params.omega_q3 * t
    return complex(np.exp(-1j * phase))


def frame_phases(params: SystemParams, t: float) -> np.ndarray:
    """Vector of :func:`frame_phase` over the whole basis."""
    size = sector_size(params.n_cavities)
    excited = np.ones(size)
    excited[-1] = 0.0
    energy = np.concatenate([excited * params.omega, excited * params.omega + params.omega_q3])
    return np.exp(-1j * energy * t)
