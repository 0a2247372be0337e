"""Two-point resistance in finite anisotropic resistor grids.

The closed form sums the far-field lattice kernel over all mirror images in
terms of Jacobi ``theta1``; a cached near-field correction restores exactness
close to every image; a graph-Laplacian solver supplies ground truth.
"""
from .correction import (CacheStats, CorrectionCache, HybridConfig, ResistanceResult,
                         cache_stats, delta_omega, near_field_limit, omega_hybrid,
                         r_finite_hybrid, within_near_field)
from .finite_grid import (GridSpec, NodeCoord, image_displacements_in_ellipse,
                          mirror_images, r_theta_closed, theta_context)
from .kernel import (EULER_GAMMA, QuadratureConfig, QuadratureError, dispersion_lambda,
                     omega_analytic_infinite, omega_exact, r1_quadrature, r2_closed, r2_primitive,
                     r2_quadrature, sinh_lambda)
from .oracle import all_resistances_from, build_laplacian, emit_netlist, r_oracle

__version__ = "0.1.0"
