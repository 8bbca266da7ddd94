"""Single-point evaluation and phase-space / spin-direction scans.

Rows are plain dicts keyed by ``COLUMNS``; absent values are ``None`` and
become empty CSV fields.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from . import bell, entanglement
from .errors import AllAmplitudesVanish, DegenerateKinematics
from .kinematics import DecayAngles, physical_region, solve_momenta
from .states import COUPLING_TYPES, SpinDirection, correlation_tensor, decay_state, spin_direction_from_rotation

OBSERVABLES = ("measures", "mermin", "svetlichny", "b442", "b442sym")
BELL_COLUMNS = ("mermin", "svetlichny", "b442", "b442sym")
# local-real bounds used for the normalised columns
NORMALISATION = {"mermin": 2.0, "svetlichny": 4.0, "b442": 4.0, "b442sym": 4.0}

COLUMNS = (
    ("theta_B", "theta_C", "spin_theta", "spin_phi", "status")
    + entanglement.REPORT_FIELDS
    + BELL_COLUMNS
    + tuple(f"{k}_norm" for k in BELL_COLUMNS)
    + ("omega",)
)

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"
STATUS_DEGENERATE = "degenerate_kinematics"
STATUS_PA_ZERO = "pA_zero"
STATUS_VANISH = "amplitudes_vanish"


@dataclass(frozen=True)
class ScanConfig:
    interaction: str = "vector"
    couplings: tuple[float, float, float, float] = (1 / math.sqrt(2),) * 4
    spin_theta: float = 0.0
    spin_phi: float = 0.0
    theta_B: float = 2 * math.pi / 3
    theta_C: float = 5 * math.pi / 6
    rot_axis: str | None = None
    rot_steps: int = 73
    rot_range: tuple[float, float] = (0.0, 2 * math.pi)
    grid: tuple[int, int] = (25, 25)
    observables: tuple[str, ...] = OBSERVABLES
    restarts: int = 64
    tol: float = 1e-12
    seed: int = 0
    include_boundary: bool = False
    threads: int = 1
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.interaction not in COUPLING_TYPES:
            raise ValueError(f"interaction must be one of {tuple(COUPLING_TYPES)}, got {self.interaction!r}")
        if len(self.couplings) != 4:
            raise ValueError("couplings need exactly four numbers")
        COUPLING_TYPES[self.interaction](*self.couplings)
        if min(self.grid) < 2 or self.rot_steps < 2:
            raise ValueError("grid and rotation steps must be >= 2")
        if not 0 < self.tol <= 1e-2:
            raise ValueError("tol must lie in (0, 1e-2]")
        if self.restarts < 1 or self.threads < 1:
            raise ValueError("restarts and threads must be positive")
        bad = set(self.observables) - set(OBSERVABLES)
        if bad:
            raise ValueError(f"unknown observables {sorted(bad)}; choose from {OBSERVABLES}")
        if self.rot_axis not in (None, "x", "y"):
            raise ValueError("rot_axis must be x or y")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    @property
    def spin(self) -> SpinDirection:
        return SpinDirection(self.spin_theta, self.spin_phi)


def empty_row(theta_B, theta_C, spin: SpinDirection, status: str, omega=None) -> dict:
    row = dict.fromkeys(COLUMNS)
    row.update(theta_B=float(theta_B), theta_C=float(theta_C), spin_theta=float(spin.theta),
               spin_phi=float(spin.phi), status=status, omega=omega)
    return row


def _kinematic_status(angles: DecayAngles) -> str:
    try:
        p = solve_momenta(angles)
    except DegenerateKinematics:
        return STATUS_DEGENERATE
    return STATUS_PA_ZERO if p.p_A == 0.0 else STATUS_OK


def run_point(config: ScanConfig, theta_B: float | None = None, theta_C: float | None = None,
              spin: SpinDirection | None = None, omega: float | None = None) -> dict:
    """Evaluate one (angles, spin) point; failures become the row's status."""
    tb = config.theta_B if theta_B is None else theta_B
    tc = config.theta_C if theta_C is None else theta_C
    spin = config.spin if spin is None else spin
    angles = DecayAngles(tb, tc)
    if not physical_region(angles):
        return empty_row(tb, tc, spin, STATUS_SKIPPED, omega)
    status = _kinematic_status(angles)
    try:
        state = decay_state(config.interaction, config.couplings, angles, spin)
    except AllAmplitudesVanish:
        return empty_row(tb, tc, spin, STATUS_VANISH, omega)
    row = empty_row(tb, tc, spin, status, omega)
    obs = set(config.observables)
    if "measures" in obs:
        row.update(entanglement.report(state).to_dict())
    T = correlation_tensor(state)
    opts = dict(restarts=config.restarts, tol=config.tol, seed=config.seed)
    if "mermin" in obs:
        row["mermin"] = bell.optimize_mermin(T, **opts).value
    if "svetlichny" in obs:
        row["svetlichny"] = bell.optimize_svetlichny(T, **opts).value
    if "b442sym" in obs:
        sym = bell.optimize_b442_sym(T)
        row["b442sym"] = sym.value
        if "b442" in obs:
            # the identity role assignment is exactly optimize_b442(T)
            row["b442"] = sym.diagnostics["per_role"]["442"]
    elif "b442" in obs:
        row["b442"] = bell.optimize_b442(T).value
    for k in BELL_COLUMNS:
        if row[k] is not None:
            row[f"{k}_norm"] = row[k] / NORMALISATION[k]
    return row


def angle_axis(n: int, include_boundary: bool) -> np.ndarray:
    """Grid values in [0, pi]; by default cell centres that avoid the edges."""
    if include_boundary:
        return np.linspace(0.0, math.pi, n)
    return (np.arange(n) + 0.5) * math.pi / n


def grid_points(config: ScanConfig) -> list[tuple[float, float]]:
    tb = angle_axis(config.grid[0], config.include_boundary)
    tc = angle_axis(config.grid[1], config.include_boundary)
    return [(float(b), float(c)) for b in tb for c in tc]


def spin_points(config: ScanConfig) -> list[tuple[float, SpinDirection]]:
    if config.rot_axis is None:
        raise ValueError("a spin sweep needs rot_axis")
    omegas = np.linspace(config.rot_range[0], config.rot_range[1], config.rot_steps)
    return [(float(w), spin_direction_from_rotation(config.rot_axis, w)) for w in omegas]


def _map(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map keeps submission order, so rows come back in grid order
        return list(pool.map(fn, items))


def run_scan(config: ScanConfig) -> list[dict]:
    """One row per (theta_B, theta_C) grid cell, theta_B-major."""
    return _map(lambda p: run_point(config, p[0], p[1]), grid_points(config), config.threads)


def run_spin_scan(config: ScanConfig) -> list[dict]:
    """One row per rotation angle of the parent spin about ``rot_axis``."""
    return _map(lambda p: run_point(config, spin=p[1], omega=p[0]), spin_points(config), config.threads)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: Iterable[dict]) -> str:
    return json.dumps([{c: row[c] for c in COLUMNS} for row in rows], indent=1) + "\n"


def write_rows(rows: list[dict], out: str | Path | None, fmt: str = "csv") -> str:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    if out is not None:
        Path(out).write_text(text)
    return text


def read_csv(path: str | Path) -> list[dict]:
    """Parse a scan CSV back into rows with floats (empty -> None)."""
    with open(path, newline="") as fh:
        rows = []
        for rec in csv.DictReader(fh):
            row = {}
            for k, v in rec.items():
                if k == "status":
                    row[k] = v
                else:
                    row[k] = float(v) if v != "" else None
            rows.append(row)
    return rows


# ---------------------------------------------------------------- config files


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment, dashes equal underscores."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def load_config_file(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())


def with_overrides(config: ScanConfig, **kwargs) -> ScanConfig:
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})
