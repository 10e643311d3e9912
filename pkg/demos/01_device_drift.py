"""
Drift of a single memristor under constant bias
================================================

A linear-drift device moves between r_on and r_off. Its M**2 changes at a
constant rate under a constant voltage, so the closed form and the RK4
integrator can be compared directly.
"""
import numpy as np

from memfuzzy.device import (
    DeviceParams,
    apply_bias,
    closed_form_memristance,
    memristance,
    saturation_time,
    state_for_memristance,
)

p = DeviceParams()
print(p)
print("drift coefficient mu_v r_on / D^2 =", p.drift_coefficient, "1/(V s)")

# %% positive bias drives the device from r_off toward r_on
m0, v = p.r_off, 1.0
ts = saturation_time(p, m0, v)
print(f"\nfrom {m0:.0f} ohm at {v} V the device reaches r_on after {ts * 1e3:.1f} ms")
print(f"{'t (ms)':>8} {'RK4 (ohm)':>12} {'closed form':>12}")
s0 = state_for_memristance(p, m0)
for t in np.array([0, 0.2, 0.4, 0.6, 0.8, 0.9, 1.2]) * ts:
    m = memristance(p, apply_bias(p, s0, v, t))
    print(f"{t * 1e3:8.1f} {m:12.2f} {closed_form_memristance(p, m0, v, t):12.2f}")

# %% below the switching threshold nothing moves (this is what protects half-selected cells)
half = apply_bias(p, s0, v / 2, 10 * ts)
print(f"\n{v / 2} V for {10 * ts * 1e3:.0f} ms leaves M at {memristance(p, half):.1f} ohm")

# %% reverse bias brings it back
mid = apply_bias(p, s0, v, 0.5 * ts)
back = apply_bias(p, mid, -v, 0.5 * ts)
print(f"forward then reverse for {0.5 * ts * 1e3:.1f} ms each: {memristance(p, mid):.1f} -> "
      f"{memristance(p, back):.4f} ohm")
