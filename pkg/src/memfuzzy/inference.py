"""Queries against a programmed crossbar.

Singleton inputs drive one column with -1 V and read every set's grade.
Fuzzy-number inputs drive all columns of an antidiagonal array at once
(``v_j = -input[j]``), so output row ``N-1-k`` carries
``mu(x_k) * input[k]`` plus leakage through the unprogrammed cells.  Grades
are returned raw; ``leakage_floor`` tells callers what "zero" reads as.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .compiler import ANTIDIAGONAL, ROWS, LayoutMeta, QuantizationGrid, encode, quantize
from .crossbar import CrossbarArray, read, singleton_read
from .programming import ProgramConfig, ProgramReport, run_session


@dataclass(frozen=True)
class FuzzyNumber:
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("fuzzy number samples must be one-dimensional")
        if np.any(s < 0) or np.any(s > 1) or np.any(np.isnan(s)):
            raise ValueError("fuzzy number samples must lie in [0, 1]")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn, grid: QuantizationGrid) -> "FuzzyNumber":
        return cls(np.asarray(fn(grid.points), dtype=float))

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class QueryResult:
    leakage_floor: float
    names: tuple = ()
    grades: Optional[np.ndarray] = None
    output: Optional[np.ndarray] = None   # fuzzy query, domain order, leakage included

    def grade(self, name: str) -> float:
        return float(self.grades[self.names.index(name)])


class UnrepresentableMembership(ValueError):
    pass


def _check_layout(array: CrossbarArray, layout: LayoutMeta, kind: str) -> None:
    if layout.kind != kind:
        raise ValueError(f"query needs a {kind!r} layout, got {layout.kind!r}")
    if layout.shape != array.shape:
        raise ValueError(f"layout {layout.shape} does not match crossbar {array.shape}")


def membership_query(array: CrossbarArray, layout: LayoutMeta, x: float) -> QueryResult:
    _check_layout(array, layout, ROWS)
    col = quantize(layout.grid, x)
    return QueryResult(array.leakage_floor, layout.names, singleton_read(array, col))


def fuzzy_number_query(array: CrossbarArray, layout: LayoutMeta,
                       fuzzy_input: FuzzyNumber) -> QueryResult:
    _check_layout(array, layout, ANTIDIAGONAL)
    n = layout.grid.n
    if len(fuzzy_input) != n:
        raise ValueError(f"input has {len(fuzzy_input)} samples, grid has {n} points")
    rows = read(array, list(-fuzzy_input.samples))
    out = rows[[layout.output_row(k) for k in range(n)]]
    return QueryResult(array.leakage_floor, layout.names, output=out)


def stored_curve(array: CrossbarArray, layout: LayoutMeta) -> np.ndarray:
    """Measured grade at every grid point: shape (sets, points), domain order."""
    if layout.shape != array.shape:
        raise ValueError(f"layout {layout.shape} does not match crossbar {array.shape}")
    n = layout.grid.n
    if layout.kind == ROWS:
        return np.column_stack([singleton_read(array, k) for k in range(n)])
    return np.array([[singleton_read(array, k)[layout.output_row(k)] for k in range(n)]])


def evolve_cell(array: CrossbarArray, layout: LayoutMeta, set_name: str, x: float,
                new_mu: float, cfg: ProgramConfig = ProgramConfig()
                ) -> tuple[CrossbarArray, ProgramReport]:
    """Reprogram the single cell holding ``set_name`` at ``x`` to ``new_mu``."""
    if layout.shape != array.shape or layout.r_feedback != array.r_feedback:
        raise ValueError("layout does not describe this crossbar (shape or r_feedback differ)")
    floor = layout.r_feedback / array.params.r_off
    if not (new_mu == 0 or floor <= new_mu <= 1):
        raise UnrepresentableMembership(
            f"membership {new_mu} not representable: nonzero grades must lie in "
            f"[leakage_floor={floor:.6g}, 1]")
    row, col = layout.cell(set_name, quantize(layout.grid, x))
    targets = array.memristances()
    targets[row, col] = float(encode(np.array([new_mu]), layout.r_feedback, array.params.r_off)[0])
    mask = np.zeros(array.shape, dtype=bool)
    mask[row, col] = True
    return run_session(array, targets, mask, cfg)
