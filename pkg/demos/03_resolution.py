"""
Finer quantization, more columns
================================

Halving the quantization step doubles the columns minus one. The old grid
points remain, so their stored values do not change. The staircase then
follows the continuous membership more closely.
"""
import numpy as np

from memfuzzy import MembershipSpec, QuantizationGrid, Triangular, compile_rows, quantize, sample_mf

tri = MembershipSpec("T", Triangular(1.3, 4.7, 9.1))
dense = np.linspace(0, 12, 4801)  # 12 is the last point of every grid below

for step in (2.0, 1.0, 0.5, 0.25):
    grid = QuantizationGrid(0, 13, step)
    tm = compile_rows([tri], grid)
    samples = sample_mf(tri, grid)
    stair = samples[[quantize(grid, x) for x in dense]]
    err = np.max(np.abs(stair - tri(dense)))
    print(f"step {step:5.2f}: {tm.shape[1]:3d} columns, max |staircase - mu| = {err:.4f}")

coarse = compile_rows([tri], QuantizationGrid(0, 13, 1)).values
fine = compile_rows([tri], QuantizationGrid(0, 13, 0.5)).values
print("coarse columns reappear unchanged in the fine matrix:", np.array_equal(fine[:, ::2], coarse))
