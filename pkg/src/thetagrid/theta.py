"""Jacobi theta functions in the ``theta(z, q)`` convention (``z`` has period pi).

``theta1(z, q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) z)``
``theta4(z, q) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2} cos(2 n z)``

with nome ``q = exp(i pi tau)``.  Series are truncated with an a-priori bound
on the next term rather than on its observed size, so an accidental zero of
``sin`` cannot stop the summation early.

:func:`log_abs_theta1` is the workhorse of the finite-grid formula.  It first
shifts ``z`` by multiples of ``pi tau`` (quasi-periodicity) and then sums a
rescaled series, so it neither overflows for large ``Im z`` nor needs more
than a handful of terms.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "ThetaContext",
    "nome_from_tau",
    "theta1",
    "theta1_with_terms",
    "theta1_prime_zero",
    "theta4_series",
    "theta4_product",
    "modular_transform_theta1",
    "log_abs_theta1",
    "log_abs_theta1_prime_zero",
]

_FLOOR = 1e-300
_MAX_TERMS = 100_000


@dataclass(frozen=True)
class ThetaContext:
    """Lattice modulus, its nome, and whether a modular swap was applied."""

    tau: complex
    nome: complex
    swapped: bool = False

    def __post_init__(self):
        if not self.tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        if not abs(self.nome) < 1:
            raise ValueError("nome must satisfy |q| < 1")


def nome_from_tau(tau) -> complex:
    """``q = exp(i pi tau)``; requires ``Im(tau) > 0``."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau must have positive imaginary part, got {tau!r}")
    return cmath.exp(1j * math.pi * tau)


def _check_nome(nome):
    nome = complex(nome)
    if not abs(nome) < 1:
        raise ValueError(f"nome must satisfy |q| < 1, got {nome!r}")
    return nome


def _qpow(log_q, e):
    # q**e on the principal branch; log_q is None for q == 0
    return 0j if log_q is None else cmath.exp(e * log_q)


def theta1_with_terms(z, nome, trunc_tol=1e-15):
    """Series value of ``theta1(z, q)`` together with the number of terms summed."""
    z = complex(z)
    nome = _check_nome(nome)
    if nome == 0:
        return 0j, 0
    log_q = cmath.log(nome)
    log_abs_q = math.log(abs(nome))
    growth = abs(z.imag)
    total = 0j
    n = 0
    while n < _MAX_TERMS:
        bound = 2.0 * math.exp(log_abs_q * (n + 0.5) ** 2 + growth * (2 * n + 1))
        if n > 0 and bound < trunc_tol * (abs(total) + _FLOOR):
            break
        sign = -1.0 if n % 2 else 1.0
        total += sign * _qpow(log_q, (n + 0.5) ** 2) * cmath.sin((2 * n + 1) * z)
        n += 1
    return 2.0 * total, n


def theta1(z, nome, trunc_tol=1e-15) -> complex:
    """Jacobi ``theta1(z, q)`` by direct series summation.

    Examples
    --------
    >>> round(theta1(math.pi / 2, 0.1).real, 6)
    1.135931
    """
    return theta1_with_terms(z, nome, trunc_tol)[0]


def theta1_prime_zero(nome, trunc_tol=1e-15) -> complex:
    """Derivative of ``theta1`` at ``z = 0``: ``2 sum (-1)^n (2n+1) q^{(n+1/2)^2}``."""
    nome = _check_nome(nome)
    if nome == 0:
        return 0j
    log_q = cmath.log(nome)
    log_abs_q = math.log(abs(nome))
    total = 0j
    for n in range(_MAX_TERMS):
        bound = 2.0 * (2 * n + 1) * math.exp(log_abs_q * (n + 0.5) ** 2)
        if n > 0 and bound < trunc_tol * (abs(total) + _FLOOR):
            break
        sign = -1.0 if n % 2 else 1.0
        total += sign * (2 * n + 1) * _qpow(log_q, (n + 0.5) ** 2)
    return 2.0 * total


def theta4_series(z, nome, tol=1e-14) -> complex:
    """``theta4`` from its Fourier series."""
    z = complex(z)
    nome = _check_nome(nome)
    if nome == 0:
        return 1 + 0j
    log_q = cmath.log(nome)
    log_abs_q = math.log(abs(nome))
    growth = 2.0 * abs(z.imag)
    total = 1 + 0j
    for n in range(1, _MAX_TERMS):
        bound = 2.0 * math.exp(log_abs_q * n * n + growth * n)
        if bound < tol * (abs(total) + _FLOOR):
            break
        sign = -1.0 if n % 2 else 1.0
        total += 2.0 * sign * _qpow(log_q, n * n) * cmath.cos(2 * n * z)
    return total


def theta4_product(z, nome, tol=1e-14) -> complex:
    """``theta4`` from the Jacobi triple product."""
    z = complex(z)
    nome = _check_nome(nome)
    if nome == 0:
        return 1 + 0j
    c2 = cmath.cos(2 * z)
    scale = 2.0 * abs(c2) + 2.0
    aq = abs(nome)
    prod = 1 + 0j
    q2 = nome * nome
    q_odd = nome  # q^(2n-1)
    q_even = q2  # q^(2n)
    for n in range(1, _MAX_TERMS):
        prod *= (1 - q_even) * (1 - 2 * q_odd * c2 + q_odd * q_odd)
        if aq ** (2 * n + 1) * scale < tol:
            break
        q_odd *= q2
        q_even *= q2
    return prod


def modular_transform_theta1(z, tau, trunc_tol=1e-15) -> complex:
    """``theta1(z | tau)`` evaluated on the transformed side ``tau' = -1/tau``.

    Uses ``theta1(z|tau) = i sqrt(i/tau) exp(-i z^2 / (pi tau)) theta1(z/tau | -1/tau)``
    with the principal square root.  For ``Im(tau)`` small the right-hand
    nome is tiny and the series converges after a couple of terms.
    """
    z = complex(z)
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau must have positive imaginary part, got {tau!r}")
    prefactor = 1j * cmath.sqrt(1j / tau) * cmath.exp(-1j * z * z / (math.pi * tau))
    return prefactor * theta1(z / tau, nome_from_tau(-1.0 / tau), trunc_tol)


def _scaled_sin(w):
    # sin(w) * exp(-|Im w|), accurate for any Im w
    x, y = w.real, w.imag
    e = math.exp(-2.0 * abs(y))
    re = math.sin(x) * 0.5 * (1.0 + e)
    im = -math.copysign(1.0, y) * math.cos(x) * 0.5 * math.expm1(-2.0 * abs(y))
    return complex(re, im)


def log_abs_theta1(z, tau, trunc_tol=1e-16) -> float:
    """``ln |theta1(z | tau)|`` without overflow.

    For ``|tau| < 1`` the series is summed at ``-1/tau`` instead, where it
    converges fast and avoids the cancellation that costs digits as
    ``|q| -> 1``.  Returns ``-inf`` at a zero of ``theta1``.
    """
    z = complex(z)
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau must have positive imaginary part, got {tau!r}")
    if abs(tau) < 1.0:
        # theta1(z|tau) = i sqrt(i/tau) exp(-i z^2 / (pi tau)) theta1(z/tau | -1/tau)
        pre = -0.5 * math.log(abs(tau)) + (-1j * z * z / (math.pi * tau)).real
        return pre + _log_abs_theta1_series(z / tau, -1.0 / tau, trunc_tol)
    return _log_abs_theta1_series(z, tau, trunc_tol)


def _log_abs_theta1_series(z, tau, trunc_tol):
    b = tau.imag
    # theta1(z + k pi tau) = (-1)^k q^{-k^2} e^{-2ikz} theta1(z)
    k = round(z.imag / (math.pi * b))
    zr = z - k * math.pi * tau
    y = abs(zr.imag)
    shift = 2.0 * k * zr.imag + math.pi * b * k * k
    ipt = 1j * math.pi * tau
    total = 0j
    for n in range(_MAX_TERMS):
        # |term_n| / |term_0| <= exp(-pi b (n^2 + n) + 2 n y)
        rel = -math.pi * b * (n * n + n) + 2.0 * n * y
        if n > 0 and math.exp(rel) < trunc_tol * (abs(total) + _FLOOR):
            break
        sign = -1.0 if n % 2 else 1.0
        weight = cmath.exp(ipt * (n * n + n) + 2.0 * n * y)
        total += sign * weight * _scaled_sin((2 * n + 1) * zr)
    if total == 0:
        return -math.inf
    return math.log(2.0) - 0.25 * math.pi * b + y + math.log(abs(total)) + shift


def log_abs_theta1_prime_zero(tau, trunc_tol=1e-16) -> float:
    """``ln |theta1'(0 | tau)|``."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau must have positive imaginary part, got {tau!r}")
    if abs(tau) < 1.0:
        # differentiate the modular relation at z = 0: an extra factor 1/tau
        return -1.5 * math.log(abs(tau)) + log_abs_theta1_prime_zero(-1.0 / tau, trunc_tol)
    b = tau.imag
    ipt = 1j * math.pi * tau
    total = 0j
    for n in range(_MAX_TERMS):
        rel = math.log(2 * n + 1) - math.pi * b * (n * n + n)
        if n > 0 and math.exp(rel) < trunc_tol * (abs(total) + _FLOOR):
            break
        sign = -1.0 if n % 2 else 1.0
        total += sign * (2 * n + 1) * cmath.exp(ipt * (n * n + n))
    return math.log(2.0) - 0.25 * math.pi * b + math.log(abs(total))
