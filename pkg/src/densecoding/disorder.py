"""Static disorder averaging on couplings and cavity frequencies.

Random numbers
--------------
Realization ``r`` under master seed ``s`` draws from a Philox4x64-10 stream
with 128-bit key ``s + (r << 64)`` and counter 0, converted to doubles on
[0, 1) as ``(u64 >> 11) * 2**-53`` (numpy's ``Generator.random``).  The
stream depends on the realization only, not on the disorder width, so every
point of a sweep reuses the same uniforms and the curves are free of
resampling noise.

Draw order for coupling disorder is ``g (q1 side), J_1 .. J_{N-1}, g2 (q2
side)``; a value that lands at or below zero is redrawn from the same stream.
Frequency disorder draws one detuning per cavity, ``1 .. N``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .evolve import interaction_propagator
from .model import SystemParams, frame_phases
from .protocol import ALL_BITS, encode, initial_state, target_state

_U64 = (1 << 64) - 1


class DisorderKind(enum.Enum):
    COUPLING = "coupling"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform static disorder of full width ``width`` (rad/time).

    ``perturb_g`` applies the coupling width to both atom-cavity couplings as
    well as the inter-cavity links; switching it off leaves g at its
    engineered value.
    """

    kind: DisorderKind
    width: float
    realizations: int = 1000
    seed: int = 0
    perturb_g: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", DisorderKind(self.kind))
        if self.width < 0:
            raise ValueError("disorder width must be non-negative")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if not 0 <= self.seed <= _U64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class DisorderResult:
    spec: DisorderSpec
    mean_fidelities: tuple[float, float, float, float]
    std_errors: tuple[float, float, float, float]
    percent_disorder: float | None
    resampled: int
    samples: np.ndarray  # (realizations, 4) fidelities F1..F4


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(realization) << 64)))


def mean_coupling(params: SystemParams) -> float:
    """Average inter-cavity coupling <J>; falls back to g for a single cavity."""
    links = params.inter_cavity
    return sum(links) / len(links) if links else params.g


def width_for_percent(params: SystemParams, percent: float) -> float:
    """Coupling-disorder width delta J giving ``percent`` of <J>."""
    return percent / 100.0 * mean_coupling(params)


def _uniform_positive(rng: np.random.Generator, center: float, width: float) -> tuple[float, int]:
    redraws = 0
    while True:
        value = center + (rng.random() - 0.5) * width
        if value > 0:
            return value, redraws
        redraws += 1


def sample_params(base: SystemParams, spec: DisorderSpec, rng: np.random.Generator) -> tuple[SystemParams, int]:
    """One disordered copy of ``base`` and the number of redrawn couplings.

    Coupling disorder perturbs g at each end and every J_k independently by a
    uniform offset in [-width/2, width/2].  Frequency disorder offsets each
    cavity frequency the same way and leaves q1, q2 and the couplings alone.
    """
    if not base.engineered:
        raise ValueError("disorder is sampled around the engineered couplings")
    if spec.width == 0:
        return base, 0
    if spec.kind is DisorderKind.COUPLING:
        centers = [base.g, *base.inter_cavity, base.g2]
        drawn, redraws = [], 0
        for i, c in enumerate(centers):
            # the draw is always consumed so the stream layout is fixed
            value, extra = _uniform_positive(rng, c, spec.width)
            if not spec.perturb_g and i in (0, len(centers) - 1):
                value, extra = c, 0
            drawn.append(value)
            redraws += extra
        return replace(base, g=drawn[0], inter_cavity=tuple(drawn[1:-1]), g2=drawn[-1]), redraws
    offsets = (rng.random(base.n_cavities) - 0.5) * spec.width
    return replace(base, cavity_detuning=tuple(float(x) for x in offsets)), 0


def realization_fidelities(params: SystemParams, t: float) -> np.ndarray:
    """F1..F4 at time ``t`` for one (possibly disordered) parameter set."""
    n = params.n_cavities
    psi0 = initial_state(params)
    # one propagator serves all four encodings
    u = frame_phases(params, t)[:, None] * interaction_propagator(params, t)
    out = np.empty(4)
    for j, bits in enumerate(ALL_BITS):
        psi = u @ encode(psi0, bits)
        out[j] = abs(np.vdot(target_state(bits, n), psi)) ** 2
    return out


def run_disorder(base: SystemParams, spec: DisorderSpec) -> DisorderResult:
    """Average the four fidelities over ``spec.realizations`` samples.

    Every realization is scored at the transfer time of the unperturbed J.
    """
    t = base.transfer_time
    samples = np.empty((spec.realizations, 4))
    redraws = 0
    for r in range(spec.realizations):
        params, extra = sample_params(base, spec, realization_rng(spec.seed, r))
        redraws += extra
        samples[r] = realization_fidelities(params, t)
    mean = samples.mean(axis=0)
    if spec.realizations > 1:
        se = samples.std(axis=0, ddof=1) / math.sqrt(spec.realizations)
    else:
        se = np.zeros(4)
    percent = None
    if spec.kind is DisorderKind.COUPLING:
        percent = 100.0 * spec.width / mean_coupling(base)
    return DisorderResult(
        spec=spec,
        mean_fidelities=tuple(float(x) for x in mean),
        std_errors=tuple(float(x) for x in se),
        percent_disorder=percent,
        resampled=redraws,
        samples=samples,
    )


def disorder_sweep(
    base: SystemParams,
    kind: DisorderKind | str,
    widths,
    realizations: int = 1000,
    seed: int = 0,
    engine: str = "matrix_exp",
    perturb_g: bool = True,
) -> list[DisorderResult]:
    """Run :func:`run_disorder` over a grid of widths (rad/time)."""
    if engine != "matrix_exp":
        raise ValueError("disordered couplings need the matrix-exponential engine")
    return [
        run_disorder(base, DisorderSpec(DisorderKind(kind), float(w), realizations, seed, perturb_g))
        for w in widths
    ]
