"""
Fuzzy-number input on the antidiagonal layout
=============================================

One set is stored on the antidiagonal of an N x N array, with grid point k at
cell (N-1-k, k). With every column driven by minus its input sample, output
row N-1-k carries mu(x_k) * input_k. Each other cell in that row is at r_off
and adds a small leakage term.
"""
import numpy as np

from memfuzzy import (
    CrossbarArray,
    FuzzyNumber,
    MembershipSpec,
    QuantizationGrid,
    Trapezoidal,
    Triangular,
    compile_antidiagonal,
    fuzzy_number_query,
    program_matrix,
    sample_mf,
)

grid = QuantizationGrid(0, 10, 1)
stored = MembershipSpec("warm", Trapezoidal(1, 3, 6, 9))
tm = compile_antidiagonal(stored, grid)
array, report = program_matrix(CrossbarArray(grid.n, grid.n), tm)
print(f"{grid.n}x{grid.n} array programmed with {report.total_pulses} pulses")

about_five = FuzzyNumber.from_function(Triangular(3, 5, 8), grid)
out = fuzzy_number_query(array, tm.layout, about_five).output
ideal = sample_mf(stored, grid) * about_five.samples

print(f"\n{'x':>4} {'stored':>7} {'input':>7} {'product':>8} {'crossbar':>9}")
for k, x in enumerate(grid.points):
    print(f"{x:4.0f} {sample_mf(stored, grid)[k]:7.3f} {about_five.samples[k]:7.3f} "
          f"{ideal[k]:8.4f} {out[k]:9.4f}")

floor = array.leakage_floor
print(f"\nmax |crossbar - product| = {np.max(np.abs(out - ideal)):.4f}; "
      f"leakage alone can add up to (N-1)*floor*max(input) = {(grid.n - 1) * floor:.4f}")
