"""Closed-loop program-and-verify for crossbar cells.

Each cell is measured through the normal read path (a singleton read inverted
as ``M = R / grade``) and pulsed toward its target until it lands within
``rel_tolerance``.  Write pulses use the V/2 half-select scheme, so later
cells can disturb earlier ones; :func:`program_matrix` therefore sweeps the
array until a full pass needs no pulses.

With ``scale_width`` on (the default) every pulse lasts
``pulse_width * (M_measured / r_off)**2``.  Under linear drift this moves
``M**2`` by the same fraction on every pulse, so the pulse count grows with
``log(M0 / target)`` rather than ``M0**2 - target**2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .crossbar import WRITE_STEPS, CrossbarArray, _write_pulse_inplace, singleton_read
from .device import DeviceParams, closed_form_memristance
from .compiler import TargetMatrix


@dataclass(frozen=True)
class ProgramConfig:
    write_voltage: float = 1.0
    pulse_width: float = 8e-3
    rel_tolerance: float = 0.01
    max_pulses_per_cell: int = 10000
    max_sweeps: int = 5
    scale_width: bool = True
    substeps: int = WRITE_STEPS

    def __post_init__(self):
        if not self.write_voltage > 0:
            raise ValueError("write_voltage must be positive")
        if not self.pulse_width > 0:
            raise ValueError("pulse_width must be positive")
        if not 0 < self.rel_tolerance < 1:
            raise ValueError("rel_tolerance must lie in (0, 1)")
        if self.max_pulses_per_cell < 1 or self.substeps < 1:
            raise ValueError("max_pulses_per_cell and substeps must be >= 1")
        # zero sweeps is accepted and can never converge
        if self.max_sweeps < 0:
            raise ValueError("max_sweeps must be >= 0")

    def width_for(self, measured: float, r_off: float) -> float:
        if self.scale_width:
            return self.pulse_width * (measured / r_off) ** 2
        return self.pulse_width


@dataclass
class ProgramReport:
    pulse_counts: np.ndarray
    rel_errors: np.ndarray      # |measured - target| / target for every cell
    pulse_time: np.ndarray      # total programming time spent on each cell (s)
    sweeps: int
    converged: bool
    max_disturb: float
    targeted: np.ndarray = field(repr=False, default=None)

    @property
    def total_pulses(self) -> int:
        return int(self.pulse_counts.sum())

    @property
    def grade_disturb_bound(self) -> float:
        """Largest relative grade change ``max_disturb`` allows (grade = R / M)."""
        d = self.max_disturb
        return d / (1 - d) if d < 1 else float("inf")

    def worst_cell(self) -> tuple[int, int]:
        err = np.where(self.targeted, self.rel_errors, -1.0)
        return tuple(int(i) for i in np.unravel_index(np.argmax(err), err.shape))

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "sweeps": self.sweeps,
            "total_pulses": self.total_pulses,
            "max_disturb": self.max_disturb,
            "grade_disturb_bound": self.grade_disturb_bound,
            "worst_cell": list(self.worst_cell()),
            "max_rel_error": float(np.max(np.where(self.targeted, self.rel_errors, 0.0))),
            "pulse_counts": self.pulse_counts.tolist(),
            "rel_errors": self.rel_errors.tolist(),
            "pulse_time": self.pulse_time.tolist(),
            "targeted": self.targeted.tolist(),
        }


class NonConvergence(RuntimeError):
    """Programming gave up; carries the offending cell and the partial state."""

    def __init__(self, message, row=None, col=None, report=None, array=None):
        super().__init__(message)
        self.row = row
        self.col = col
        self.report = report
        self.array = array


def measure_cell(array: CrossbarArray, row: int, col: int) -> float:
    array._check_index(row, col)
    return array.r_feedback / singleton_read(array, col)[row]


def _within(measured: float, target: float, tol: float) -> bool:
    return abs(measured - target) <= tol * target


def _program_cell_inplace(array: CrossbarArray, row: int, col: int, target: float,
                          cfg: ProgramConfig) -> tuple[int, float]:
    r_off = array.params.r_off
    pulses, on_time = 0, 0.0
    while True:
        m = measure_cell(array, row, col)
        if _within(m, target, cfg.rel_tolerance):
            return pulses, on_time
        if pulses >= cfg.max_pulses_per_cell:
            raise NonConvergence(
                f"cell ({row}, {col}) at {m:.6g} ohm after {pulses} pulses, target {target:.6g} ohm "
                f"(tolerance {cfg.rel_tolerance}); pulse_width too coarse or budget too small",
                row, col)
        v = cfg.write_voltage if m > target else -cfg.write_voltage
        width = cfg.width_for(m, r_off)
        _write_pulse_inplace(array, row, col, v, width, cfg.substeps)
        pulses += 1
        on_time += width


def _check_target(array: CrossbarArray, target: float) -> None:
    p = array.params
    if not p.r_on <= target <= p.r_off:
        raise ValueError(f"target {target} outside [{p.r_on}, {p.r_off}]")


def program_cell(array: CrossbarArray, row: int, col: int, target: float,
                 cfg: ProgramConfig = ProgramConfig()) -> tuple[CrossbarArray, int]:
    """Program one cell to ``target`` ohms; returns the new array and the pulse count."""
    array._check_index(row, col)
    _check_target(array, target)
    work = array.copy()
    pulses, _ = _program_cell_inplace(work, row, col, target, cfg)
    return work, pulses


def estimate_pulses(params: DeviceParams, m0: float, target: float,
                    cfg: ProgramConfig = ProgramConfig()) -> Optional[int]:
    """Pulse count the verify loop needs, replayed with the exact drift solution.

    Ignores disturb from neighbours.  ``None`` when the budget would run out.
    """
    m, n = m0, 0
    while not _within(m, target, cfg.rel_tolerance):
        if n >= cfg.max_pulses_per_cell:
            return None
        v = cfg.write_voltage if m > target else -cfg.write_voltage
        m = closed_form_memristance(params, m, v, cfg.width_for(m, params.r_off))
        n += 1
    return n


def measure_all(array: CrossbarArray) -> np.ndarray:
    """Memristance of every cell via one singleton read per column."""
    grades = np.column_stack([singleton_read(array, j) for j in range(array.cols)])
    return array.r_feedback / grades


def run_session(array: CrossbarArray, targets: np.ndarray, mask: np.ndarray,
                cfg: ProgramConfig) -> tuple[CrossbarArray, ProgramReport]:
    """Sweep the cells in ``mask`` (row-major) until one sweep needs no pulses."""
    work = array.copy()
    pulses = np.zeros(array.shape, dtype=int)
    pulse_time = np.zeros(array.shape)
    # memristance each cell had right after it was last pulsed (start of session if never)
    ref = measure_all(work)
    cells = [tuple(int(i) for i in c) for c in np.argwhere(mask)]
    converged = False
    pulsed = np.zeros(array.shape, dtype=bool)
    sweeps = 0

    def report():
        final = measure_all(work)
        idle = ~pulsed
        disturb = np.abs(final - ref) / ref
        return ProgramReport(
            pulse_counts=pulses.copy(),
            rel_errors=np.abs(final - targets) / targets,
            pulse_time=pulse_time.copy(),
            sweeps=sweeps,
            converged=converged,
            max_disturb=float(disturb[idle].max()) if idle.any() else 0.0,
            targeted=mask.copy(),
        )

    for sweeps in range(1, cfg.max_sweeps + 1):
        pulsed = np.zeros(array.shape, dtype=bool)
        for i, j in cells:
            try:
                n, t = _program_cell_inplace(work, i, j, float(targets[i, j]), cfg)
            except NonConvergence as exc:
                exc.report, exc.array = report(), work
                raise
            if n:
                pulsed[i, j] = True
                pulses[i, j] += n
                pulse_time[i, j] += t
                ref[i, j] = measure_cell(work, i, j)
        if not pulsed.any():
            converged = True
            break

    rep = report()
    if not converged:
        i, j = rep.worst_cell()
        raise NonConvergence(
            f"no clean verify sweep within max_sweeps={cfg.max_sweeps}; worst cell ({i}, {j}) "
            f"rel. error {rep.rel_errors[i, j]:.3g}", i, j, rep, work)
    return work, rep


def program_matrix(array: CrossbarArray, targets: TargetMatrix,
                   cfg: ProgramConfig = ProgramConfig()) -> tuple[CrossbarArray, ProgramReport]:
    """Program every cell whose target differs from ``r_off``.

    Cells targeted at ``r_off`` are never pulsed; whatever half-select disturb
    they pick up is reported in ``max_disturb`` rather than corrected.
    """
    values = np.asarray(targets.values, dtype=float)
    if values.shape != array.shape:
        raise ValueError(f"targets {values.shape} do not match crossbar {array.shape}")
    p = array.params
    if np.any(values < p.r_on) or np.any(values > p.r_off):
        raise ValueError("targets must lie in [r_on, r_off]")
    return run_session(array, values, values != p.r_off, cfg)
