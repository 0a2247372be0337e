"""
Correction cache and the nome swap
==================================

Random queries on a 101 x 101 grid reuse a small set of near-field
corrections.  Long thin grids are evaluated with the transposed nome, which
leaves the answer unchanged.
"""

import math

from thetagrid import GridSpec, theta
from thetagrid.experiments import bench
from thetagrid.finite_grid import r_theta_closed, theta_context

# Hit rate of the correction cache over 5000 seeded queries.
rep = bench(GridSpec.from_alpha(101, 101, 10.0), 5000, seed=1)
print(rep.summary())

# A 100 x 4 strip at alpha = 2 has |q| close to one in its natural
# orientation, so the transposed grid is used instead.
grid = GridSpec.from_alpha(100, 4, 2.0)
q = abs(theta.nome_from_tau(1j * grid.ly / (math.sqrt(grid.alpha) * grid.lx)))
print(f"\nnatural |q| = {q:.4f}, swapped: {theta_context(grid).swapped}")
for s, d in (((0, 0), (99, 3)), ((40, 1), (41, 1)), ((5, 0), (5, 3))):
    a = r_theta_closed(s, d, grid)
    b = r_theta_closed((s[1], s[0]), (d[1], d[0]), grid.transposed())
    print(f"{s} -> {d}: {a:.12f}  transposed {b:.12f}")
