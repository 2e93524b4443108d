"""Experiment runners behind the CLI and the comma-separated result tables."""

from __future__ import annotations

import datetime as _dt
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, angular, parse_frequency
from .disorder import DisorderKind, DisorderSpec, run_disorder, width_for_percent
from .evolve import evolve_matrix_exp, transfer_probability
from .model import BasisState, Kind, basis_index, basis_vector
from .open_system import DecayRates, dissipative_fidelities
from .protocol import ALL_BITS, fidelity_curve, phase_condition

_F = ["F1", "F2", "F3", "F4"]
_SE = ["se1", "se2", "se3", "se4"]


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[float]]
    metadata: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("ragged result table")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])

    def to_csv(self) -> str:
        lines = [f"# {key}: {value}" for key, value in self.metadata]
        lines.append(",".join(self.columns))
        # repr gives the shortest string that round-trips the double exactly
        lines.extend(",".join(repr(float(x)) for x in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def read_table(path: str | Path) -> ResultTable:
    meta, body = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta.append((key, value))
        elif line:
            body.append(line)
    columns = body[0].split(",")
    rows = [[float(x) for x in line.split(",")] for line in body[1:]]
    return ResultTable(columns, rows, meta)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        moment = _dt.datetime.now(tz=_dt.timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _transfer_curve(cfg: ExperimentConfig) -> ResultTable:
    params, _ = cfg.system()
    n = params.n_cavities
    start = basis_vector(n, BasisState(Kind.Q1_EXCITED))
    q2 = basis_index(n, BasisState(Kind.Q2_EXCITED))
    rows = []
    for jt in cfg.sweep.values(False):
        psi = evolve_matrix_exp(params, start, jt / params.j_unit)
        rows.append([jt, transfer_probability(n, jt), abs(psi[q2]) ** 2])
    return ResultTable(["jt", "P", "P_matrix_exp"], rows)


def _ideal_fidelity(cfg: ExperimentConfig) -> ResultTable:
    params, _ = cfg.system()
    jt = np.array(cfg.sweep.values(False))
    fids = fidelity_curve(params, jt, cfg.engine)
    return ResultTable(["jt", *_F], [[x, *f] for x, f in zip(jt, fids)])


def _decay_sweep(cfg: ExperimentConfig) -> ResultTable:
    params, rates = cfg.system()
    rows = []
    for nu_k in cfg.sweep.values(True):
        f = dissipative_fidelities(params, DecayRates(angular(nu_k), rates.gamma))
        rows.append([nu_k, *(f[b] for b in ALL_BITS)])
    return ResultTable(["kappa_over_2pi_hz", *_F], rows)


def _superconducting_point(cfg: ExperimentConfig) -> ResultTable:
    params, rates = cfg.system()
    f = dissipative_fidelities(params, rates)
    nu_k = parse_frequency(cfg.params.get("kappa", 0.0))
    nu_g = parse_frequency(cfg.params.get("gamma", 0.0))
    row = [nu_k, nu_g, params.transfer_time, *(f[b] for b in ALL_BITS)]
    return ResultTable(["kappa_over_2pi_hz", "gamma_over_2pi_hz", "transfer_time_s", *_F], [row])


def _disorder(cfg: ExperimentConfig, kind: DisorderKind) -> ResultTable:
    params, _ = cfg.system()
    rows = []
    for x in cfg.sweep.values(False):
        if kind is DisorderKind.COUPLING:
            width = width_for_percent(params, x)
        else:
            width = x * params.j_unit
        res = run_disorder(params, DisorderSpec(kind, width, cfg.realizations, cfg.seed, cfg.perturb_g))
        rows.append([x, width / params.j_unit, *res.mean_fidelities, *res.std_errors, float(res.resampled)])
    first = "percent_disorder" if kind is DisorderKind.COUPLING else "dw_over_J"
    return ResultTable([first, "width_over_J", *_F, *_SE, "resampled"], rows)


_RUNNERS = {
    "transfer_curve": _transfer_curve,
    "ideal_fidelity": _ideal_fidelity,
    "decay_sweep": _decay_sweep,
    "superconducting_point": _superconducting_point,
    "disorder_coupling": lambda cfg: _disorder(cfg, DisorderKind.COUPLING),
    "disorder_frequency": lambda cfg: _disorder(cfg, DisorderKind.FREQUENCY),
}


def run(cfg: ExperimentConfig) -> ResultTable:
    """Run one experiment and attach the metadata block."""
    table = _RUNNERS[cfg.experiment](cfg)
    params, _ = cfg.system()
    pc = phase_condition(params)
    table.metadata = [
        ("densecoding", __version__),
        ("experiment", cfg.experiment),
        ("config", cfg.echo()),
        ("phase_condition", f"n={pc.n} m={pc.m} compliant={pc.compliant}"),
        ("timestamp", _timestamp()),
    ]
    return table
