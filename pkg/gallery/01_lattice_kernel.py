"""
The infinite-lattice kernel
===========================

Dimensionless resistance of an unbounded anisotropic grid, computed three
ways: by quadrature, from the logarithmic far-field form, and as the
difference that the hybrid method stores in its cache.
"""

import math

import numpy as np

from thetagrid import kernel

# Calibration values on the square lattice: neighbours sit at 1/2 and
# diagonal neighbours at 2/pi.
print("omega(1,0) =", kernel.omega_exact((1, 0), 1.0))
print("omega(1,1) =", kernel.omega_exact((1, 1), 1.0), " 2/pi =", 2 / math.pi)

# Along the diagonal the logarithm takes over quickly.
for n in (1, 2, 4, 8, 16, 32):
    exact = kernel.omega_exact((n, n), 1.0)
    far = kernel.omega_analytic_infinite((n, n), 1.0)
    print(f"n={n:3d}  exact {exact:.10f}  log form {far:.10f}  rel {abs(far - exact) / exact:.2e}")

# With alpha = r_h / r_v = 10 the horizontal axis is the stiff one.  The
# residual exact - log is what the logarithm misses near the source.
alpha = 10.0
dx = np.arange(1, 9)
resid_x = [kernel.omega_exact((int(k), 0), alpha) - kernel.omega_analytic_infinite((int(k), 0), alpha)
           for k in dx]
resid_y = [kernel.omega_exact((0, int(k)), alpha) - kernel.omega_analytic_infinite((0, int(k)), alpha)
           for k in dx]
print("\nalpha = 10, exact - log form")
print(" d    along x        along y")
for k, a, b in zip(dx, resid_x, resid_y):
    print(f"{k:2d}  {a: .3e}  {b: .3e}")

# The second piece of the on-axis split has a closed form that agrees with
# its quadrature to rounding.
for a in (0.1, 1.0, 10.0):
    print(f"alpha={a:5.1f}  r2 closed {kernel.r2_closed(a):.12f}  quadrature {kernel.r2_quadrature(a):.12f}")
