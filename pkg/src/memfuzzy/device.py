"""Single-memristor behavioral model (linear dopant drift).

The device is a doped/undoped bilayer of length ``length_d``.  Its state is
the normalized doped-region length ``x = w / D``; memristance mixes the two
limiting resistances linearly::

    M(x) = r_on * x + r_off * (1 - x)

and the boundary drifts with the current::

    dx/dt = (mobility * r_on / length_d**2) * i(t),   i = v / M(x)

``x`` is hard-clamped to [0, 1].  Drift only happens while ``|v|`` exceeds
``v_threshold``; below it the device is inert.  Positive voltage (applied at
the doped-side terminal, i.e. the row wire in a crossbar) grows ``x`` and
lowers the memristance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

#: Substeps used by :func:`apply_bias` when the caller does not choose.
DEFAULT_STEPS = 512


@dataclass(frozen=True)
class DeviceParams:
    r_on: float = 100.0
    r_off: float = 16e3
    length_d: float = 10e-9
    mobility: float = 1e-14
    v_threshold: float = 0.75

    def __post_init__(self):
        if not 0 < self.r_on < self.r_off:
            raise ValueError(f"need 0 < r_on < r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if self.length_d <= 0 or self.mobility <= 0:
            raise ValueError("length_d and mobility must be positive")
        if self.v_threshold < 0:
            raise ValueError("v_threshold must be non-negative")

    @property
    def drift_coefficient(self) -> float:
        """``mobility * r_on / D**2``: rate of ``x`` per ampere."""
        return self.mobility * self.r_on / self.length_d ** 2

    @property
    def delta_r(self) -> float:
        return self.r_off - self.r_on

    def scaled(self, factor: float) -> "DeviceParams":
        """Same geometry with both resistances multiplied by ``factor``."""
        if factor == 1.0:
            return self
        return replace(self, r_on=self.r_on * factor, r_off=self.r_off * factor)

    def switches(self, v: float) -> bool:
        return abs(v) > self.v_threshold


@dataclass(frozen=True)
class DeviceState:
    x: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"state x must lie in [0, 1], got {self.x}")


def memristance(params: DeviceParams, state: DeviceState) -> float:
    return params.r_on * state.x + params.r_off * (1.0 - state.x)


def state_for_memristance(params: DeviceParams, m: float) -> DeviceState:
    """Inverse of :func:`memristance` (used to set up tests and arrays)."""
    if not params.r_on <= m <= params.r_off:
        raise ValueError(f"memristance {m} outside [{params.r_on}, {params.r_off}]")
    return DeviceState(min(1.0, max(0.0, (params.r_off - m) / params.delta_r)))


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def apply_bias(
    params: DeviceParams,
    state: DeviceState,
    v: float,
    duration: float,
    steps: int = DEFAULT_STEPS,
) -> DeviceState:
    """Integrate the drift under a constant voltage ``v`` for ``duration`` seconds.

    Classic RK4 with ``steps`` equal substeps.  Stage states are clamped before
    the rate is evaluated and ``x`` is clamped after every substep, so
    over-drive saturates at the boundaries instead of leaving [0, 1].
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if duration == 0 or not params.switches(v):
        return state

    a = params.drift_coefficient * v
    r_off, dr = params.r_off, params.delta_r
    h = duration / steps
    hh = 0.5 * h

    # stage states are clamped inline; this loop is the hot path of programming
    x = state.x
    for _ in range(steps):
        k1 = a / (r_off - dr * x)
        y = x + hh * k1
        k2 = a / (r_off - dr * (0.0 if y < 0.0 else (1.0 if y > 1.0 else y)))
        y = x + hh * k2
        k3 = a / (r_off - dr * (0.0 if y < 0.0 else (1.0 if y > 1.0 else y)))
        y = x + h * k3
        k4 = a / (r_off - dr * (0.0 if y < 0.0 else (1.0 if y > 1.0 else y)))
        x = _clamp(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    return DeviceState(x)


def apply_bias_array(
    r_on: np.ndarray,
    r_off: np.ndarray,
    x: np.ndarray,
    v: float,
    duration: float,
    params: DeviceParams,
    steps: int = DEFAULT_STEPS,
) -> np.ndarray:
    """Vectorized :func:`apply_bias` over cells sharing one drive voltage.

    ``r_on``/``r_off`` are per-cell (already scaled) resistances; geometry and
    threshold come from ``params``.  Returns the new ``x`` array.
    """
    if duration == 0 or not params.switches(v):
        return x.copy()
    a = params.mobility * r_on / params.length_d ** 2 * v
    dr = r_off - r_on
    h = duration / steps

    def rate(xx):
        return a / (r_off - dr * np.clip(xx, 0.0, 1.0))

    x = x.astype(float, copy=True)
    for _ in range(steps):
        k1 = rate(x)
        k2 = rate(x + 0.5 * h * k1)
        k3 = rate(x + 0.5 * h * k2)
        k4 = rate(x + h * k3)
        x = np.clip(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0)
    return x


def closed_form_memristance(params: DeviceParams, m0: float, v: float, t: float) -> float:
    """Exact memristance after constant ``v`` for ``t`` seconds.

    From ``M dM/dt = -(r_off - r_on) * k * v`` the square of the memristance
    moves linearly in time.  Test oracle for :func:`apply_bias`.
    """
    if not params.r_on <= m0 <= params.r_off:
        raise ValueError(f"m0={m0} outside [{params.r_on}, {params.r_off}]")
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0 or not params.switches(v):
        return m0
    m_sq = m0 * m0 - 2.0 * params.delta_r * params.drift_coefficient * v * t
    if m_sq <= params.r_on ** 2:
        return params.r_on
    return min(math.sqrt(m_sq), params.r_off)


def saturation_time(params: DeviceParams, m0: float, v: float) -> float:
    """Time at constant ``v`` until the state reaches the boundary it is driven to."""
    if not params.switches(v):
        return math.inf
    end = params.r_on if v > 0 else params.r_off
    return abs(m0 * m0 - end * end) / (2.0 * params.delta_r * params.drift_coefficient * abs(v))
