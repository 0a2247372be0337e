"""
Error tables on a 50 x 50 grid
==============================

Mean and maximum relative error of the hybrid formula against the exact
Laplacian solution, over every node of the grid, for several anisotropies
and source positions.  Takes about half a minute.
"""

from thetagrid import GridSpec
from thetagrid.experiments import error_map

print("source (0,0)")
print(" alpha     mean %     max %")
for alpha in (1.0, 2.0, 10.0, 20.0, 50.0, 0.02):
    rep = error_map(GridSpec.from_alpha(50, 50, alpha), (0, 0))
    print(f"{alpha:6g}  {100 * rep.mean_rel_error:9.4f}  {100 * rep.max_rel_error:8.4f}")

print("\nalpha = 10")
print(" source      mean %     max %")
grid = GridSpec.from_alpha(50, 50, 10.0)
for src in ((0, 0), (25, 0), (25, 25), (10, 40)):
    rep = error_map(grid, src)
    print(f"{str(src):9s}  {100 * rep.mean_rel_error:9.4f}  {100 * rep.max_rel_error:8.4f}")

# Without the near-field correction the theta formula alone keeps a
# visible error along the axes through the source.
ref = error_map(grid, (0, 0), "theta")
hyb = error_map(grid, (0, 0), "hybrid")
for name, rep in (("theta", ref), ("hybrid", hyb)):
    on_axis, off_axis = rep.axis_split()
    print(f"{name:6s} on-axis max {100 * on_axis:.4f}%  off-axis max {100 * off_axis:.4f}%")
