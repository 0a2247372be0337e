"""Built-in invariant checks, run by ``thetagrid selftest``."""
from __future__ import annotations

import math
import random
import time

import numpy as np
from scipy.special import digamma

from . import kernel, theta
from .correction import CorrectionCache, r_finite_hybrid
from .experiments import bench, error_map
from .finite_grid import GridSpec, image_displacements_in_ellipse, mirror_images, r_theta_closed
from .oracle import all_resistances_from, build_laplacian, r_oracle


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_constants():
    err = abs(kernel.EULER_GAMMA + float(digamma(1.0)))
    return err < 1e-15, f"|gamma + digamma(1)| = {err:.1e}"


def check_kernel_calibration():
    a = kernel.omega_exact((1, 0), 1.0)
    b = kernel.omega_exact((1, 1), 1.0)
    return abs(a - 0.5) < 1e-6 and abs(b - 2 / math.pi) < 1e-5, f"(1,0)={a:.12f} (1,1)={b:.12f}"


def check_r2_closed_form():
    worst = max(abs(kernel.r2_closed(a) - kernel.r2_quadrature(a))
                for a in (0.01, 0.1, 0.5, 1, 2, 10, 100))
    return worst < 1e-8, f"max |closed - quadrature| = {worst:.2e}"


def check_sinh_consistency():
    worst = 0.0
    for a in (0.01, 1.0, 100.0):
        for t in np.geomspace(1e-4, math.pi, 25):
            s = kernel.sinh_lambda(t, a)
            worst = max(worst, _rel(math.sinh(kernel.dispersion_lambda(t, a)), s))
    return worst < 1e-12, f"max rel = {worst:.2e}"


def check_far_field():
    devs = [_rel(kernel.omega_analytic_infinite((n, n), 1.0), kernel.omega_exact((n, n), 1.0))
            for n in (1, 2, 4, 8, 16)]
    ok = all(x > y for x, y in zip(devs, devs[1:])) and devs[-1] < 5e-4
    return ok, "rel deviations " + ", ".join(f"{d:.2e}" for d in devs)


def check_theta_identities():
    rng = random.Random(7)
    worst_tp = 0.0
    for q in (0.1, 0.3, 0.5, 0.7):
        for _ in range(8):
            z = rng.uniform(0, math.pi)
            worst_tp = max(worst_tp, abs(theta.theta4_series(z, q) - theta.theta4_product(z, q)))
    worst_mod = 0.0
    for b in np.linspace(0.05, 1.0, 8):
        tau = 1j * b
        q = theta.nome_from_tau(tau)
        for z in (0.1, 0.7, 1.3 + 0.2j):
            direct = theta.theta1(z, q)
            worst_mod = max(worst_mod, abs(direct - theta.modular_transform_theta1(z, tau))
                            / max(abs(direct), 1e-300))
    terms = max(theta.theta1_with_terms(z, q)[1] for q in (0.5, 0.8, 0.9)
                for z in (0.3, 1.0, 2.5))
    ok = worst_tp < 1e-12 and worst_mod < 1e-9 and terms <= 40
    return ok, f"triple product {worst_tp:.1e}, modular {worst_mod:.1e}, terms {terms}"


def check_theta_symmetries():
    rng = random.Random(11)
    worst_odd = worst_per = 0.0
    for _ in range(40):
        z = complex(rng.uniform(-3, 3), rng.uniform(-0.5, 0.5))
        q = rng.uniform(0.01, 0.9)
        t = theta.theta1(z, q)
        worst_odd = max(worst_odd, abs(theta.theta1(-z, q) + t))
        worst_per = max(worst_per, abs(theta.theta1(z + math.pi, q) + t))
    return worst_odd < 1e-14 and worst_per < 1e-12, f"odd {worst_odd:.1e}, period {worst_per:.1e}"


def check_log_theta():
    worst = 0.0
    for b in (0.2, 1.0, 3.0):
        tau = 1j * b
        q = theta.nome_from_tau(tau)
        for z in (0.4, 1.1 + 0.3j, 0.2 - 1.5j):
            worst = max(worst, abs(theta.log_abs_theta1(z, tau) - math.log(abs(theta.theta1(z, q)))))
    return worst < 1e-12, f"max |log difference| = {worst:.1e}"


def check_mirror_and_ellipse():
    fam = mirror_images((3, 2))
    ok = list(fam) == [(3, 2), (-4, 2), (3, -3), (-4, -3)]
    grid = GridSpec.from_alpha(4, 3, 2.0)
    for a, b in (((0, 0), (0, 0)), ((1, 2), (3, 0))):
        got = sorted((t.dx, t.dy) for t in image_displacements_in_ellipse(a, b, grid, 40.0))
        want = sorted((a[0] - (bx + 2 * m * 4), a[1] - (by + 2 * n * 3))
                      for m in range(-10, 11) for n in range(-10, 11)
                      for bx, by in mirror_images(b)
                      if 2 * (a[0] - bx - 8 * m) ** 2 + (a[1] - by - 6 * n) ** 2 <= 40.0)
        ok = ok and got == want
    return ok, "mirror family and ellipse enumeration"


def check_finite_grid():
    rng = random.Random(3)
    grid = GridSpec.from_alpha(17, 11, 3.0)
    worst = 0.0
    positive = True
    for _ in range(20):
        s = (rng.randrange(17), rng.randrange(11))
        d = (rng.randrange(17), rng.randrange(11))
        if s == d:
            continue
        a, b = r_theta_closed(s, d, grid), r_theta_closed(d, s, grid)
        positive &= a > 0
        worst = max(worst, _rel(a, b))
    swap_grid = GridSpec.from_alpha(100, 4, 2.0)
    swap = max(_rel(r_theta_closed(s, d, swap_grid), r_theta_closed(s, d, swap_grid, swap_nome=1.0))
               for s, d in (((0, 0), (99, 3)), ((10, 1), (12, 2)), ((50, 0), (51, 0))))
    ok = positive and worst < 1e-12 and swap < 1e-9
    return ok, f"reciprocity {worst:.1e}, swap {swap:.1e}"


def check_oracle():
    grid = GridSpec.from_alpha(10, 10, 2.5)
    lap = build_laplacian(grid)
    rows = float(np.abs(np.asarray(lap.sum(axis=1))).max())
    batch = all_resistances_from((2, 3), grid)
    pair = r_oracle((2, 3), (9, 7), grid)
    rng = random.Random(5)
    metric = True
    for _ in range(10):
        a, b, c = [(rng.randrange(10), rng.randrange(10)) for _ in range(3)]
        metric &= r_oracle(a, c, grid) <= r_oracle(a, b, grid) + r_oracle(b, c, grid) + 1e-12
    ok = rows < 1e-12 * lap.diagonal().max() and _rel(batch[7, 9], pair) < 1e-10 and metric
    return ok, f"row sums {rows:.1e}, batch vs pair {_rel(batch[7, 9], pair):.1e}"


def check_hybrid_small():
    grid = GridSpec.from_alpha(20, 20, 10.0)
    oracle = all_resistances_from((0, 0), grid)
    cache = CorrectionCache()
    hyb = theta_only = 0.0
    for n in grid.nodes():
        if n == (0, 0):
            continue
        ref = oracle[n.y, n.x]
        hyb = max(hyb, _rel(r_finite_hybrid((0, 0), n, grid, cache).resistance_ohms, ref))
        theta_only = max(theta_only, _rel(r_theta_closed((0, 0), n, grid), ref))
    ok = hyb < 5e-3 and 10 * hyb < theta_only
    return ok, f"20x20 alpha=10 max rel error hybrid {hyb:.2e}, theta {theta_only:.2e}"


def check_table_sweep():
    parts = []
    ok = True
    for alpha, mean_bound, max_bound in ((1.0, 1.4e-4, 4.02e-3), (10.0, 4.55e-4, 5.87e-3)):
        rep = error_map(GridSpec.from_alpha(50, 50, alpha), (0, 0))
        ok &= rep.mean_rel_error <= mean_bound and rep.max_rel_error <= max_bound
        parts.append(f"alpha={alpha:g} mean {rep.mean_rel_error:.2e} max {rep.max_rel_error:.2e}")
    return ok, "; ".join(parts)


def check_bench():
    rep = bench(GridSpec.from_alpha(101, 101, 10.0), 2000, seed=0)
    return rep.hit_rate >= 0.9, f"hit rate {rep.hit_rate:.3f}"


FAST_CHECKS = [
    check_constants,
    check_kernel_calibration,
    check_r2_closed_form,
    check_sinh_consistency,
    check_far_field,
    check_theta_identities,
    check_theta_symmetries,
    check_log_theta,
    check_mirror_and_ellipse,
    check_finite_grid,
    check_oracle,
    check_hybrid_small,
]
SLOW_CHECKS = [check_table_sweep, check_bench]


def run(fast=False, out=print) -> int:
    """Run the checks, report one line each, return the process exit code."""
    checks = FAST_CHECKS if fast else FAST_CHECKS + SLOW_CHECKS
    failures = 0
    for check in checks:
        name = check.__name__.removeprefix("check_")
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # a crash counts as a failed invariant
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        out(f"{'PASS' if ok else 'FAIL'}  {name:<22} {detail}  [{time.perf_counter() - t0:.2f}s]")
    out(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 1 if failures else 0

