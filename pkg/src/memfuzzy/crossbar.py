"""Memristor crossbar with ideal inverting-summer row readout.

Rows are held at virtual ground by their opamps, so each row current is the
sum of per-column currents ``v_j / M_ij`` and undriven (high-impedance)
columns float to 0 V.  With feedback resistance ``R``::

    grade_i = -R * sum_j v_j / M_ij

A -1 V pulse on a single column therefore reads ``R / M_i,col`` on every row.

Drives are sequences with one entry per column: a voltage, or ``None``
(:data:`HIGH_Z`) for a disconnected column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .device import DeviceParams, DeviceState, apply_bias, apply_bias_array, memristance

HIGH_Z = None

#: Substeps for the integration of one write pulse.
WRITE_STEPS = 4

Drive = Sequence[Optional[float]]


@dataclass
class CrossbarArray:
    """Grid of memristor states plus the readout feedback resistance.

    ``x`` holds the normalized dopant position of every cell and ``scale`` a
    per-cell resistance factor (device-to-device variability).  Treat
    instances as values: the public operations return new arrays.
    """

    rows: int
    cols: int
    params: DeviceParams = field(default_factory=DeviceParams)
    r_feedback: Optional[float] = None
    x: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("crossbar needs at least one row and one column")
        if self.r_feedback is None:
            self.r_feedback = self.params.r_on
        if self.r_feedback < self.params.r_on:
            raise ValueError(
                f"r_feedback={self.r_feedback} < r_on={self.params.r_on}: grade 1 unrepresentable"
            )
        shape = (self.rows, self.cols)
        self.x = np.zeros(shape) if self.x is None else np.array(self.x, dtype=float)
        self.scale = np.ones(shape) if self.scale is None else np.array(self.scale, dtype=float)
        if self.x.shape != shape or self.scale.shape != shape:
            raise ValueError(f"state grids must have shape {shape}")
        if np.any(self.x < 0) or np.any(self.x > 1):
            raise ValueError("cell states must lie in [0, 1]")
        if np.any(self.scale < 0.5) or np.any(self.scale > 2.0):
            raise ValueError("cell scale factors must lie in [0.5, 2.0]")

    def copy(self) -> "CrossbarArray":
        return CrossbarArray(self.rows, self.cols, self.params, self.r_feedback,
                             self.x.copy(), self.scale.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def leakage_floor(self) -> float:
        """Grade read from an unprogrammed nominal cell."""
        return self.r_feedback / self.params.r_off

    def memristances(self) -> np.ndarray:
        p = self.params
        return self.scale * (p.r_on * self.x + p.r_off * (1.0 - self.x))

    def cell_params(self, row: int, col: int) -> DeviceParams:
        return self.params.scaled(float(self.scale[row, col]))

    def cell_state(self, row: int, col: int) -> DeviceState:
        return DeviceState(float(self.x[row, col]))

    def cell_memristance(self, row: int, col: int) -> float:
        self._check_index(row, col)
        return memristance(self.cell_params(row, col), self.cell_state(row, col))

    def _check_index(self, row: Optional[int], col: Optional[int]) -> None:
        if row is not None and not 0 <= row < self.rows:
            raise IndexError(f"row {row} out of range for {self.rows} rows")
        if col is not None and not 0 <= col < self.cols:
            raise IndexError(f"column {col} out of range for {self.cols} columns")


def drive_voltages(drive: Drive, cols: int) -> np.ndarray:
    """Column voltages with high-impedance entries at 0 V (they float at ground)."""
    if len(drive) != cols:
        raise ValueError(f"drive has {len(drive)} entries, crossbar has {cols} columns")
    return np.array([0.0 if v is None else float(v) for v in drive])


def add_drives(d1: Drive, d2: Drive) -> list[Optional[float]]:
    """Sum two drives; a column is high-impedance only if both are."""
    if len(d1) != len(d2):
        raise ValueError("drives differ in length")
    return [None if a is None and b is None else (a or 0.0) + (b or 0.0) for a, b in zip(d1, d2)]


def read(array: CrossbarArray, drive: Drive) -> np.ndarray:
    """Per-row grades for a column drive.  Never changes the array."""
    v = drive_voltages(drive, array.cols)
    return -array.r_feedback * ((1.0 / array.memristances()) @ v)


def singleton_drive(cols: int, col: int, v: float = -1.0) -> list[Optional[float]]:
    drive: list[Optional[float]] = [HIGH_Z] * cols
    drive[col] = v
    return drive


def singleton_read(array: CrossbarArray, col: int) -> np.ndarray:
    """Grades ``R / M_i,col`` from a -1 V pulse on ``col``, all else high-impedance."""
    array._check_index(None, col)
    # Same as read() with a one-hot drive; only the driven column contributes.
    m = array.scale[:, col] * (array.params.r_on * array.x[:, col]
                               + array.params.r_off * (1.0 - array.x[:, col]))
    return array.r_feedback / m


def _write_pulse_inplace(array: CrossbarArray, row: int, col: int, v: float, width: float,
                         steps: int = WRITE_STEPS) -> None:
    p = array.params
    sel = apply_bias(array.cell_params(row, col), array.cell_state(row, col), v, width, steps)
    half = 0.5 * v
    if p.switches(half):
        for idx in (np.s_[row, :], np.s_[:, col]):
            sc = array.scale[idx]
            array.x[idx] = apply_bias_array(sc * p.r_on, sc * p.r_off, array.x[idx], half,
                                            width, p, steps)
    array.x[row, col] = sel.x


def write_pulse(array: CrossbarArray, row: int, col: int, v: float, width: float,
                steps: int = WRITE_STEPS) -> CrossbarArray:
    """Apply one V/2 half-select write pulse and return the resulting array.

    The selected cell sees ``v`` for ``width`` seconds, cells sharing only its
    row or column see ``v/2``, all others see nothing.
    """
    array._check_index(row, col)
    if width <= 0:
        raise ValueError("pulse width must be positive")
    out = array.copy()
    _write_pulse_inplace(out, row, col, v, width, steps)
    return out
