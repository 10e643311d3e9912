"""
Two fuzzy sets in a 2-row crossbar
==================================

Each row stores one membership function, and each column is one point of the
integer grid. A membership mu is written as the memristance R/mu. Driving one
column with -1 V makes each row's inverting amplifier output R/M, which is
mu again.
"""
import numpy as np

from memfuzzy import (
    CrossbarArray,
    MembershipSpec,
    QuantizationGrid,
    Tabulated,
    compile_rows,
    membership_query,
    program_matrix,
    sample_mf,
    stored_curve,
)

A = MembershipSpec("A", Tabulated([(1, 0), (2, 0.125), (3, 0.25), (4, 1.0), (5, 0.5), (6, 0.25), (7, 0)]))
B = MembershipSpec("B", Tabulated([(2, 0), (3, 0.25), (4, 0.375), (5, 0.5), (6, 0.625), (7, 0.75),
                                   (8, 0.875), (9, 1.0), (13, 1.0)]))
grid = QuantizationGrid(0, 13, 1)

targets = compile_rows([A, B], grid)
print("target memristances (ohm):")
print(np.array2string(targets.values, precision=0, suppress_small=True, max_line_width=120))

array, report = program_matrix(CrossbarArray(2, grid.n), targets)
print(f"\nprogrammed in {report.sweeps} sweeps, {report.total_pulses} pulses, "
      f"worst error {report.rel_errors[report.targeted].max():.4f}")

# %% a crisp input x = 3 selects column 3
res = membership_query(array, targets.layout, 3)
print(f"\nx = 3 -> A: {res.grade('A'):.4f}  B: {res.grade('B'):.4f}")

# %% an unprogrammed cell still conducts through r_off
res = membership_query(array, targets.layout, 8)
print(f"x = 8 -> A: {res.grade('A'):.5f}  (leakage floor R/r_off = {res.leakage_floor})")

# %% the whole discrete curve, as measured
curve = stored_curve(array, targets.layout)
ideal = np.array([sample_mf(A, grid), sample_mf(B, grid)])
print(f"\n{'x':>4} {'A':>7} {'A ideal':>8} {'B':>7} {'B ideal':>8}")
for k, x in enumerate(grid.points):
    print(f"{x:4.0f} {curve[0, k]:7.4f} {ideal[0, k]:8.4f} {curve[1, k]:7.4f} {ideal[1, k]:8.4f}")
