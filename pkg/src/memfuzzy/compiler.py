"""Membership functions, input quantization and target-memristance layouts.

A membership grade ``mu`` is stored as the memristance ``R / mu`` (``R`` the
feedback resistance), so a singleton read returns ``mu`` back.  Grades that
would need more than ``r_off`` (``0 < mu < R / r_off``) cannot be encoded
and are clipped to ``r_off``, exactly like ``mu = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .device import DeviceParams


# --------------------------------------------------------------------------
# Shapes


@dataclass(frozen=True)
class Triangular:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c or self.a == self.c:
            raise ValueError(f"triangular needs a <= b <= c with a < c, got {self}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c = self.a, self.b, self.c
        up = np.ones_like(x) if b == a else (x - a) / (b - a)
        down = np.ones_like(x) if c == b else (c - x) / (c - b)
        mu = np.where(x <= b, up, down)
        return np.clip(np.where((x < a) | (x > c), 0.0, mu), 0.0, 1.0)


@dataclass(frozen=True)
class Trapezoidal:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d or self.a == self.d:
            raise ValueError(f"trapezoidal needs a <= b <= c <= d with a < d, got {self}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c, d = self.a, self.b, self.c, self.d
        up = np.ones_like(x) if b == a else (x - a) / (b - a)
        down = np.ones_like(x) if d == c else (d - x) / (d - c)
        mu = np.where(x < b, up, np.where(x > c, down, 1.0))
        return np.clip(np.where((x < a) | (x > d), 0.0, mu), 0.0, 1.0)


@dataclass(frozen=True)
class Gaussian:
    mean: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("gaussian sigma must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if math.isinf(self.sigma):
            return np.ones_like(x)
        return np.exp(-0.5 * ((x - self.mean) / self.sigma) ** 2)


def _check_knots(knots) -> tuple[tuple[float, float], ...]:
    knots = tuple((float(x), float(mu)) for x, mu in knots)
    if not knots:
        raise ValueError("need at least one knot")
    xs = [k[0] for k in knots]
    if any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("knot positions must be strictly increasing")
    if any(not 0.0 <= k[1] <= 1.0 for k in knots):
        raise ValueError("membership values must lie in [0, 1]")
    return knots


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear between knots; the end values extend flat beyond them (shoulders)."""

    knots: tuple

    def __post_init__(self):
        object.__setattr__(self, "knots", _check_knots(self.knots))

    def __call__(self, x):
        xs, mus = zip(*self.knots)
        return np.interp(np.asarray(x, dtype=float), xs, mus)


@dataclass(frozen=True)
class Tabulated:
    """Linear between samples, zero outside the sampled support."""

    samples: tuple

    def __post_init__(self):
        object.__setattr__(self, "samples", _check_knots(self.samples))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xs, mus = zip(*self.samples)
        inside = (x >= xs[0]) & (x <= xs[-1])
        return np.where(inside, np.interp(x, xs, mus), 0.0)


Shape = Union[Triangular, Trapezoidal, Gaussian, PiecewiseLinear, Tabulated]


@dataclass(frozen=True)
class MembershipSpec:
    name: str
    shape: Shape

    def __call__(self, x):
        return self.shape(x)


# --------------------------------------------------------------------------
# Quantization


class OutOfDomainError(ValueError):
    pass


@dataclass(frozen=True)
class QuantizationGrid:
    x_min: float
    x_max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("quantization step must be positive")
        if not self.x_min < self.x_max:
            raise ValueError("need x_min < x_max")

    @property
    def n(self) -> int:
        # tolerance absorbs binary representation of decimal steps (13 / 0.1 ...)
        return int(math.floor((self.x_max - self.x_min) / self.step + 1e-9)) + 1

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.step * np.arange(self.n)

    def with_step(self, step: float) -> "QuantizationGrid":
        return QuantizationGrid(self.x_min, self.x_max, step)


def quantize(grid: QuantizationGrid, x: float) -> int:
    """Nearest grid column; exact midpoints go to the upper neighbour.

    The accepted domain is ``[x_min - step/2, x_max_grid + step/2)`` where
    ``x_max_grid`` is the last grid point.
    """
    pos = (x - grid.x_min) / grid.step
    idx = math.floor(pos + 0.5) if math.isfinite(pos) else -1
    if not 0 <= idx < grid.n:
        raise OutOfDomainError(
            f"x={x} outside quantizer domain [{grid.x_min - grid.step / 2}, "
            f"{grid.points[-1] + grid.step / 2})"
        )
    return idx


def sample_mf(spec: MembershipSpec, grid: QuantizationGrid) -> np.ndarray:
    mu = np.asarray(spec(grid.points), dtype=float)
    if np.any(mu < 0) or np.any(mu > 1) or np.any(np.isnan(mu)):
        raise ValueError(f"membership {spec.name!r} left [0, 1] on the grid")
    return mu


# --------------------------------------------------------------------------
# Layouts

ROWS = "rows"
ANTIDIAGONAL = "antidiagonal"


@dataclass(frozen=True)
class LayoutMeta:
    """How a compiled matrix maps onto fuzzy sets and domain points.

    ``kind`` is ``"rows"`` (one row per set, one column per grid point) or
    ``"antidiagonal"`` (one set on an N x N array, grid point k at cell
    (N-1-k, k)).
    """

    kind: str
    names: tuple
    grid: QuantizationGrid
    r_feedback: float

    def __post_init__(self):
        if self.kind not in (ROWS, ANTIDIAGONAL):
            raise ValueError(f"unknown layout kind {self.kind!r}")
        if self.kind == ANTIDIAGONAL and len(self.names) != 1:
            raise ValueError("antidiagonal layout stores exactly one set")
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def shape(self) -> tuple[int, int]:
        n = self.grid.n
        return (len(self.names), n) if self.kind == ROWS else (n, n)

    def cell(self, name: str, k: int) -> tuple[int, int]:
        """Crossbar cell holding set ``name`` at grid point ``k``."""
        if name not in self.names:
            raise KeyError(f"no fuzzy set named {name!r}; have {list(self.names)}")
        if not 0 <= k < self.grid.n:
            raise IndexError(f"grid point {k} out of range")
        if self.kind == ROWS:
            return self.names.index(name), k
        return self.grid.n - 1 - k, k

    def output_row(self, k: int) -> int:
        """Antidiagonal: opamp row whose output is the sample at grid point ``k``."""
        return self.grid.n - 1 - k


@dataclass
class TargetMatrix:
    values: np.ndarray
    layout: LayoutMeta
    clipped: list = field(default_factory=list)  # (set name, grid x, mu) below the floor

    @property
    def shape(self):
        return self.values.shape


def encode(mu: np.ndarray, r_feedback: float, r_off: float) -> np.ndarray:
    """Target memristances for membership grades (``r_off`` below the floor)."""
    mu = np.asarray(mu, dtype=float)
    floor = r_feedback / r_off
    ok = mu >= floor
    target = np.where(ok, r_feedback / np.where(ok, mu, 1.0), r_off)
    return np.minimum(target, r_off)


def _check_feedback(r_feedback: float, params: DeviceParams) -> None:
    if r_feedback < params.r_on:
        raise ValueError(
            f"r_feedback={r_feedback} below r_on={params.r_on}: membership 1 is unrepresentable"
        )


def _clipped(spec: MembershipSpec, mu: np.ndarray, grid: QuantizationGrid, floor: float):
    pts = grid.points
    return [(spec.name, float(pts[j]), float(mu[j]))
            for j in np.flatnonzero((mu > 0) & (mu < floor))]


def compile_rows(specs: Sequence[MembershipSpec], grid: QuantizationGrid,
                 r_feedback: Optional[float] = None,
                 params: DeviceParams = DeviceParams()) -> TargetMatrix:
    r_feedback = params.r_on if r_feedback is None else r_feedback
    _check_feedback(r_feedback, params)
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate set names in {names}")
    floor = r_feedback / params.r_off
    values = np.empty((len(specs), grid.n))
    clipped = []
    for i, spec in enumerate(specs):
        mu = sample_mf(spec, grid)
        values[i] = encode(mu, r_feedback, params.r_off)
        clipped += _clipped(spec, mu, grid, floor)
    return TargetMatrix(values, LayoutMeta(ROWS, tuple(names), grid, r_feedback), clipped)


def compile_antidiagonal(spec: MembershipSpec, grid: QuantizationGrid,
                         r_feedback: Optional[float] = None,
                         params: DeviceParams = DeviceParams()) -> TargetMatrix:
    r_feedback = params.r_on if r_feedback is None else r_feedback
    _check_feedback(r_feedback, params)
    n = grid.n
    mu = sample_mf(spec, grid)
    values = np.full((n, n), params.r_off)
    k = np.arange(n)
    values[n - 1 - k, k] = encode(mu, r_feedback, params.r_off)
    layout = LayoutMeta(ANTIDIAGONAL, (spec.name,), grid, r_feedback)
    return TargetMatrix(values, layout, _clipped(spec, mu, grid, r_feedback / params.r_off))
