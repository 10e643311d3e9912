"""
Changing a stored membership in place
=====================================

A stored membership value can be rewritten without touching the rest. Only
the one cell is pulsed. Its neighbours see half the write voltage, which sits
below the switching threshold, so they stay put. On a threshold-free device
the same operation reports the disturbance it caused.
"""
import numpy as np

from memfuzzy import (
    CrossbarArray,
    DeviceParams,
    MembershipSpec,
    QuantizationGrid,
    Triangular,
    compile_rows,
    evolve_cell,
    membership_query,
    program_matrix,
    state_for_memristance,
    stored_curve,
)

grid = QuantizationGrid(0, 8, 1)
sets = [MembershipSpec("low", Triangular(0, 2, 5)), MembershipSpec("high", Triangular(3, 6, 8))]
tm = compile_rows(sets, grid)
array, _ = program_matrix(CrossbarArray(2, grid.n), tm)

before = stored_curve(array, tm.layout)
new, rep = evolve_cell(array, tm.layout, "low", 4, 0.9)
after = stored_curve(new, tm.layout)
print(f"low(4): {before[0, 4]:.4f} -> {membership_query(new, tm.layout, 4).grade('low'):.4f} "
      f"with {rep.total_pulses} pulses")
changed = np.argwhere(after != before)
print("cells whose grade changed:", [tuple(int(v) for v in c) for c in changed])

# %% the same on a device without a threshold: half-selected cells drift
free = DeviceParams(v_threshold=0.0)
tm_free = compile_rows(sets, grid, params=free)
a = CrossbarArray(2, grid.n, free)
a.x[:] = [[state_for_memristance(free, m).x for m in row] for row in tm_free.values]
b, rep = evolve_cell(a, tm_free.layout, "low", 3, 0.8)
drift = np.abs(stored_curve(b, tm_free.layout) - stored_curve(a, tm_free.layout)) / stored_curve(a, tm_free.layout)
drift[0, 3] = 0
print(f"\nthreshold-free: max_disturb={rep.max_disturb:.4f}, "
      f"grade bound {rep.grade_disturb_bound:.4f}, worst other grade change {drift.max():.4f}")
