"""Infinite anisotropic lattice kernel.

The kernel ``Omega(dx, dy; alpha)`` is the dimensionless two-point resistance
of an infinite rectangular resistor lattice, in units of the vertical unit
resistance ``r0 = r_v``, with ``alpha = r_h / r_v``.  ``dx`` counts horizontal
lattice steps and ``dy`` vertical ones.

Three evaluation routes live here:

* :func:`omega_exact` -- adaptive quadrature of the one-dimensional integral
  representation (exact up to quadrature tolerance),
* :func:`omega_analytic_infinite` -- the far-field logarithmic closed form,
* :func:`r1_quadrature`, :func:`r2_quadrature`, :func:`r2_closed` -- the
  pieces of the asymptotic split ``Omega ~ 2 (R1 + R2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

#: Euler-Mascheroni constant.
EULER_GAMMA = 0.57721566490153286061

__all__ = [
    "EULER_GAMMA",
    "QuadratureConfig",
    "QuadratureError",
    "check_alpha",
    "dispersion_lambda",
    "sinh_lambda",
    "omega_exact",
    "omega_analytic_infinite",
    "r1_quadrature",
    "r2_closed",
    "r2_primitive",
    "r2_quadrature",
]


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not meet its tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive Gauss-Kronrod integrations."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


def check_alpha(alpha) -> float:
    """Validate an anisotropy ratio and return it as a float."""
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"anisotropy must be positive and finite, got {alpha!r}")
    return alpha


def _check_theta(theta):
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")


def dispersion_lambda(theta, alpha):
    """Decay exponent ``lambda >= 0`` with ``cosh(lambda) = 1 + alpha - alpha*cos(theta)``.

    Computed as ``asinh`` of :func:`sinh_lambda`, which keeps full relative
    precision for small ``theta`` where ``arccosh`` of a number close to one
    would lose half the digits.
    """
    return math.asinh(sinh_lambda(theta, alpha))


def sinh_lambda(theta, alpha):
    """``sinh(lambda) = 2 sqrt(alpha) sin(theta/2) sqrt(1 + alpha sin^2(theta/2))``."""
    _check_theta(theta)
    alpha = check_alpha(alpha)
    s = math.sin(0.5 * theta)
    return 2.0 * math.sqrt(alpha) * s * math.sqrt(1.0 + alpha * s * s)


def _one_minus_damped_cos(a, b):
    # 1 - exp(-a) cos(b) without cancellation for small a, b
    return -math.expm1(-a) + 2.0 * math.exp(-a) * math.sin(0.5 * b) ** 2


def _integrate_panels(f, edges, cfg):
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        out = quad(f, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                   limit=cfg.max_subdivisions, full_output=1)
        value, abserr, info = out[:3]
        if len(out) > 3:
            raise QuadratureError(
                f"quadrature on [{lo:.6g}, {hi:.6g}] failed "
                f"(estimated error {abserr:.3g}): {out[3]}")
        total += value
    return total


def omega_exact(d, alpha, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Exact infinite-lattice kernel by adaptive quadrature.

    .. math::

        \\Omega(d_x, d_y) = \\frac{\\alpha}{\\pi} \\int_0^\\pi
            \\frac{1 - e^{-|d_x|\\lambda(t)} \\cos(d_y t)}{\\sinh\\lambda(t)}\\,dt

    The normalisation gives ``omega_exact((1, 0), 1) == 0.5``.  The interval
    is split into ``max(1, |dy|)`` panels so that each holds at most one
    period of the oscillating cosine.

    Parameters
    ----------
    d : tuple of int
        Lattice displacement ``(dx, dy)``.
    alpha : float
        Anisotropy ratio ``r_h / r_v``.
    cfg : QuadratureConfig, optional

    Returns
    -------
    float
        Resistance in units of ``r_v``.

    Raises
    ------
    QuadratureError
        If a panel does not converge within ``cfg.max_subdivisions``.
    """
    dx, dy = abs(int(d[0])), abs(int(d[1]))
    alpha = check_alpha(alpha)
    if dx == 0 and dy == 0:
        return 0.0
    sqa = math.sqrt(alpha)

    def integrand(t):
        s = math.sin(0.5 * t)
        sh = 2.0 * sqa * s * math.sqrt(1.0 + alpha * s * s)
        if sh == 0.0:
            # removable singularity: the ratio tends to |dx|
            return float(dx)
        lam = math.asinh(sh)
        return _one_minus_damped_cos(dx * lam, dy * t) / sh

    edges = np.linspace(0.0, math.pi, max(dy, 1) + 1)
    return alpha / math.pi * _integrate_panels(integrand, edges, cfg)


def omega_analytic_infinite(d, alpha) -> float:
    """Far-field closed form of the kernel.

    ``(sqrt(alpha) / 2 pi) * [ln(alpha dx^2 + dy^2) + 2 gamma + ln 16 - ln(alpha + 1)]``.
    The horizontal displacement carries the factor ``alpha``; this is the
    orientation produced by the integral in :func:`omega_exact`.  At the
    origin the formula diverges and ``0.0`` is returned instead.
    """
    dx, dy = abs(int(d[0])), abs(int(d[1]))
    alpha = check_alpha(alpha)
    if dx == 0 and dy == 0:
        return 0.0
    rho2 = alpha * dx * dx + dy * dy
    return math.sqrt(alpha) / (2.0 * math.pi) * (
        math.log(rho2) + 2.0 * EULER_GAMMA + math.log(16.0) - math.log1p(alpha))


def r2_closed(alpha) -> float:
    """Closed form of the singular integral: ``sqrt(alpha)/(4 pi) ln(16 / (pi^2 (alpha+1)))``."""
    alpha = check_alpha(alpha)
    return math.sqrt(alpha) / (4.0 * math.pi) * (
        math.log(16.0 / math.pi ** 2) - math.log1p(alpha))


def r2_primitive(u, alpha) -> float:
    """Antiderivative ``ln((sqrt(1 + alpha sin^2 u) - cos u) / sin u)`` on ``0 < u <= pi/2``.

    Its derivative is ``1 / (sin u sqrt(1 + alpha sin^2 u))``; subtracting
    ``ln u`` and letting ``u -> 0`` gives :func:`r2_closed`.
    """
    alpha = check_alpha(alpha)
    if not 0.0 < u <= 0.5 * math.pi:
        raise ValueError(f"u must lie in (0, pi/2], got {u!r}")
    s = math.sin(u)
    r = math.sqrt(1.0 + alpha * s * s)
    # r - cos u = (1 - cos u) + (r - 1), each computed without cancellation
    num = 2.0 * math.sin(0.5 * u) ** 2 + alpha * s * s / (1.0 + r)
    return math.log(num / s)


def r2_quadrature(alpha, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Numerical value of the singular integral, independent of :func:`r2_closed`.

    Integrates ``1/(sin u sqrt(1 + alpha sin^2 u)) - 1/u`` over ``(0, pi/2)``
    and scales by ``sqrt(alpha) / (2 pi)``.
    """
    alpha = check_alpha(alpha)

    def integrand(u):
        if u == 0.0:
            return 0.0
        s = math.sin(u)
        r = math.sqrt(1.0 + alpha * s * s)
        # u - s*r split so that both pieces are small near u = 0
        num = (u - s) - alpha * s ** 3 / (1.0 + r)
        return num / (u * s * r)

    value = _integrate_panels(integrand, (0.0, 0.5 * math.pi), cfg)
    return math.sqrt(alpha) / (2.0 * math.pi) * value


def r1_quadrature(d, alpha, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Logarithmic part of the asymptotic kernel split.

    ``(sqrt(alpha)/2 pi) * int_0^pi [1 - exp(-|dx| sqrt(alpha) t) cos(dy t)] / t dt``.
    Together with :func:`r2_closed` it satisfies
    ``omega_exact ~ 2 * (r1 + r2)`` at large distance; the factor two is the
    ratio of the ``alpha/pi`` kernel normalisation to the ``alpha/(2 pi)``
    one in which the split is usually written.  The split is not exact at
    short range (at the origin ``r1 = 0`` but ``r2 != 0``).
    """
    dx, dy = abs(int(d[0])), abs(int(d[1]))
    alpha = check_alpha(alpha)
    if dx == 0 and dy == 0:
        return 0.0
    a = dx * math.sqrt(alpha)

    def integrand(t):
        if t == 0.0:
            return a
        return _one_minus_damped_cos(a * t, dy * t) / t

    edges = np.linspace(0.0, math.pi, max(dy, 1) + 1)
    return math.sqrt(alpha) / (2.0 * math.pi) * _integrate_panels(integrand, edges, cfg)
