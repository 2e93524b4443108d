"""Quantum dense coding through an engineered coupled-cavity array."""

__version__ = "0.1.0"

from .model import BasisState, Kind, SystemParams, build_hamiltonian, default_couplings, frame_phase
from .protocol import ALL_BITS, ClassicalBits, run_protocol

__all__ = [
    "ALL_BITS",
    "BasisState",
    "ClassicalBits",
    "Kind",
    "SystemParams",
    "build_hamiltonian",
    "default_couplings",
    "frame_phase",
    "run_protocol",
]
