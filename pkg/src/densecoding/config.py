"""Experiment configuration: units, presets and validation.

A config is a YAML mapping (JSON works too)::

    experiment: decay_sweep
    preset: photonic-crystal
    params:
      gamma: 3.5 MHz
    sweep: {start: 0 MHz, stop: 70 MHz, points: 30}
    seed: 7

Frequencies are written as ordinary frequencies nu = omega / 2 pi with a unit
suffix (Hz, kHz, MHz, GHz, THz) and converted to angular rates on load.
Sweep bounds carry units for ``decay_sweep`` and are dimensionless for the
rest: ``J t`` for the two time-domain experiments, percent of <J> for
``disorder_coupling`` and ``delta omega / J`` for ``disorder_frequency``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .model import SystemParams
from .open_system import DecayRates
from .protocol import snap_to_phase_condition

EXPERIMENTS = (
    "transfer_curve",
    "ideal_fidelity",
    "decay_sweep",
    "superconducting_point",
    "disorder_coupling",
    "disorder_frequency",
)

UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12}
_UNIT_ORDER = ("THz", "GHz", "MHz", "kHz", "Hz")
_FREQ_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")
_SEED_MAX = (1 << 64) - 1


class ConfigError(ValueError):
    pass


def parse_frequency(text) -> float:
    """``"6.92 THz"`` -> 6.92e12 (Hz).  Bare numbers are taken as Hz."""
    if isinstance(text, bool):
        raise ConfigError(f"not a frequency: {text!r}")
    if isinstance(text, (int, float)):
        return float(text)
    match = _FREQ_RE.match(str(text))
    if not match:
        raise ConfigError(f"cannot parse frequency {text!r}")
    value, unit = match.groups()
    if unit == "":
        unit = "Hz"
    if unit not in UNITS:
        raise ConfigError(f"unknown unit {unit!r}; use one of {', '.join(UNITS)}")
    return float(value) * UNITS[unit]


def format_frequency(hz: float) -> str:
    """Canonical text form: largest unit keeping the mantissa >= 1, 12 digits."""
    for unit in _UNIT_ORDER:
        if abs(hz) >= UNITS[unit]:
            return f"{hz / UNITS[unit]:.12g} {unit}"
    return f"{hz:.12g} Hz"


def angular(hz: float) -> float:
    return 2.0 * math.pi * hz


PRESETS: dict[str, dict] = {
    "ideal": {
        "n_cavities": 4,
        "J": "1 Hz",
        "omega": "9995 Hz",
        "omega_q3": "10000 Hz",
        "kappa": "0 Hz",
        "gamma": "0 Hz",
        "snap_phase": False,
    },
    "photonic-crystal": {
        "n_cavities": 10,
        "J": "7 GHz",
        "omega": "6.92 THz",
        "omega_q3": "7 THz",
        "kappa": "0 Hz",
        "gamma": "3.5 MHz",
        "snap_phase": True,
    },
    "superconducting": {
        "n_cavities": 10,
        "J": "1.9 MHz",
        "omega": "1.88 GHz",
        "omega_q3": "1.9 GHz",
        "kappa": "1.8 kHz",
        "gamma": "1 kHz",
        "snap_phase": True,
    },
}

_PARAM_KEYS = {"n_cavities", "J", "omega", "omega_q3", "g", "kappa", "gamma", "snap_phase"}

_DEFAULT_SWEEPS = {
    # odd point counts put J t = pi/2 on the grid
    "transfer_curve": {"start": 0.0, "stop": math.pi, "points": 201},
    "ideal_fidelity": {"start": 0.0, "stop": math.pi, "points": 201},
    "decay_sweep": {"start": "0 MHz", "stop": "70 MHz", "points": 30},
    "superconducting_point": None,
    "disorder_coupling": {"start": 0.0, "stop": 30.0, "points": 7},
    "disorder_frequency": {"start": 0.0, "stop": 1.0, "points": 11},
}

_DEFAULT_PRESETS = {
    "transfer_curve": "ideal",
    "ideal_fidelity": "ideal",
    "decay_sweep": "photonic-crystal",
    "superconducting_point": "superconducting",
    "disorder_coupling": "photonic-crystal",
    "disorder_frequency": "photonic-crystal",
}


@dataclass
class Sweep:
    start: float | str
    stop: float | str
    points: int

    def values(self, with_units: bool) -> list[float]:
        conv = parse_frequency if with_units else _as_float
        a, b = conv(self.start), conv(self.stop)
        if self.points == 1:
            return [a]
        step = (b - a) / (self.points - 1)
        return [a + i * step for i in range(self.points)]


@dataclass
class ExperimentConfig:
    experiment: str
    preset: str | None = None
    params: dict = field(default_factory=dict)
    sweep: Sweep | None = None
    engine: str = "matrix_exp"
    realizations: int = 1000
    seed: int = 0
    perturb_g: bool = True
    output: str | None = None

    def echo(self) -> str:
        """Single-line JSON holding everything needed to rerun (output path excluded)."""
        data = asdict(self)
        data.pop("output")
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def system(self) -> tuple[SystemParams, DecayRates]:
        p = self.params
        j = angular(parse_frequency(p["J"]))
        params = SystemParams(
            n_cavities=int(p["n_cavities"]),
            j_unit=j,
            omega=angular(parse_frequency(p["omega"])),
            omega_q3=angular(parse_frequency(p["omega_q3"])),
            g=angular(parse_frequency(p["g"])) if p.get("g") is not None else None,
        )
        if p.get("snap_phase"):
            params = snap_to_phase_condition(params)
        rates = DecayRates(
            kappa=angular(parse_frequency(p.get("kappa", 0.0))),
            gamma=angular(parse_frequency(p.get("gamma", 0.0))),
        )
        return params, rates


def _as_float(value) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}") from None


def _as_int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    try:
        out = int(value)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if out < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {out}")
    return out


def build_config(raw: dict, preset: str | None = None, seed: int | None = None, output: str | None = None) -> ExperimentConfig:
    """Validate a raw mapping and fill defaults; command-line overrides win."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - {"experiment", "preset", "params", "sweep", "engine", "realizations", "seed", "perturb_g", "output"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")

    name = preset or raw.get("preset") or _DEFAULT_PRESETS[experiment]
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    overrides = raw.get("params") or {}
    if not isinstance(overrides, dict):
        raise ConfigError("params must be a mapping")
    bad = set(overrides) - _PARAM_KEYS
    if bad:
        raise ConfigError(f"unknown params: {sorted(bad)}")
    params = {**PRESETS[name], **overrides}
    for key in ("J", "omega", "omega_q3", "g", "kappa", "gamma"):
        if params.get(key) is not None:
            params[key] = format_frequency(parse_frequency(params[key]))
    params["n_cavities"] = _as_int(params["n_cavities"], "n_cavities", 1)
    params["snap_phase"] = bool(params.get("snap_phase", False))
    if parse_frequency(params["J"]) <= 0:
        raise ConfigError("J must be positive")

    sweep = None
    default_sweep = _DEFAULT_SWEEPS[experiment]
    if default_sweep is not None:
        given = raw.get("sweep")
        if given is not None and not isinstance(given, dict):
            raise ConfigError("sweep must be a mapping with start, stop, points")
        merged = {**default_sweep, **(given or {})}
        points = _as_int(merged["points"], "sweep.points", 0)
        if points < 1:
            raise ConfigError("sweep grid is empty")
        with_units = experiment == "decay_sweep"
        if with_units:
            start = format_frequency(parse_frequency(merged["start"]))
            stop = format_frequency(parse_frequency(merged["stop"]))
        else:
            start, stop = _as_float(merged["start"]), _as_float(merged["stop"])
        sweep = Sweep(start, stop, points)
    elif raw.get("sweep") is not None:
        raise ConfigError(f"{experiment} takes no sweep")

    engine = raw.get("engine", "matrix_exp")
    if engine not in ("matrix_exp", "closed_form"):
        raise ConfigError(f"unknown engine {engine!r}")
    seed_value = seed if seed is not None else raw.get("seed", 0)
    seed_value = _as_int(seed_value, "seed", 0)
    if seed_value > _SEED_MAX:
        raise ConfigError("seed must fit in 64 bits")
    return ExperimentConfig(
        experiment=experiment,
        preset=name,
        params=params,
        sweep=sweep,
        engine=engine,
        realizations=_as_int(raw.get("realizations", 1000), "realizations", 1),
        seed=seed_value,
        perturb_g=bool(raw.get("perturb_g", True)),
        output=output if output is not None else raw.get("output"),
    )


def load_raw(path: str | Path) -> dict:
    """Read a YAML/JSON config, or the config echo line of a result table."""
    text = Path(path).read_text()
    for line in text.splitlines():
        if line.startswith("# config: "):
            return json.loads(line[len("# config: "):])
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not hold a mapping")
    return data
