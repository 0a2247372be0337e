"""Finite rectangular grids with insulating edges: mirror images and the theta closed form.

Node ``(x, y)`` lives on ``0 <= x < lx``, ``0 <= y < ly``.  Reflecting the grid
about the half-integer lines ``x = -1/2`` and ``y = -1/2`` produces three
images per node; translating the four-member family by ``(2 m lx, 2 n ly)``
tiles the plane.  Summing the infinite-lattice kernel over that image lattice
reproduces the insulating boundary exactly, and the log-sum collapses into a
ratio of ``theta1`` products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import kernel
from .kernel import check_alpha
from .theta import ThetaContext, log_abs_theta1, log_abs_theta1_prime_zero, nome_from_tau

__all__ = [
    "GridSpec",
    "NodeCoord",
    "ImageDisplacement",
    "DegenerateThetaError",
    "mirror_images",
    "isotropic_point",
    "theta_context",
    "r_theta_closed",
    "image_displacements_in_ellipse",
    "SWAP_NOME",
]

#: Nome magnitude above which the grid is transposed before evaluation.
SWAP_NOME = 0.9

_LOG_TINY = math.log(1e-300)


class DegenerateThetaError(ArithmeticError):
    """A theta factor in the denominator vanished numerically."""


class NodeCoord(NamedTuple):
    x: int
    y: int


class ImageDisplacement(NamedTuple):
    """Displacement ``a - image`` with the image's lattice cell and family index (1..4)."""

    dx: int
    dy: int
    m: int
    n: int
    family: int


@dataclass(frozen=True)
class GridSpec:
    """An ``lx`` by ``ly`` node grid with horizontal and vertical unit resistances (ohms)."""

    lx: int
    ly: int
    r_h: float = 1.0
    r_v: float = 1.0

    def __post_init__(self):
        if int(self.lx) != self.lx or int(self.ly) != self.ly:
            raise ValueError("grid dimensions must be integers")
        if self.lx < 1 or self.ly < 1 or self.lx * self.ly < 2:
            raise ValueError(f"grid must hold at least two nodes, got {self.lx}x{self.ly}")
        for name in ("r_h", "r_v"):
            r = getattr(self, name)
            if not (r > 0 and math.isfinite(r)):
                raise ValueError(f"{name} must be positive and finite, got {r!r}")

    @classmethod
    def from_alpha(cls, lx, ly, alpha, r0=1.0):
        """Grid with ``r_v = r0`` and ``r_h = alpha * r0``."""
        alpha = check_alpha(alpha)
        return cls(lx, ly, r_h=alpha * r0, r_v=r0)

    @property
    def alpha(self) -> float:
        return self.r_h / self.r_v

    @property
    def r0(self) -> float:
        return self.r_v

    @property
    def node_count(self) -> int:
        return self.lx * self.ly

    def transposed(self) -> "GridSpec":
        """Same network with the axes exchanged."""
        return GridSpec(self.ly, self.lx, r_h=self.r_v, r_v=self.r_h)

    def contains(self, node) -> bool:
        x, y = node
        return 0 <= x < self.lx and 0 <= y < self.ly

    def check_node(self, node) -> NodeCoord:
        x, y = node
        if int(x) != x or int(y) != y or not self.contains(node):
            raise ValueError(f"node {tuple(node)} outside {self.lx}x{self.ly} grid")
        return NodeCoord(int(x), int(y))

    def nodes(self):
        """All nodes in row-major order (``y`` outer, ``x`` inner)."""
        return [NodeCoord(x, y) for y in range(self.ly) for x in range(self.lx)]


def mirror_images(node):
    """The four base reflections ``(x, y), (-x-1, y), (x, -y-1), (-x-1, -y-1)``."""
    x, y = node
    return (NodeCoord(x, y), NodeCoord(-x - 1, y), NodeCoord(x, -y - 1), NodeCoord(-x - 1, -y - 1))


def isotropic_point(node, alpha) -> complex:
    """Complex coordinate ``x + i y / sqrt(alpha)``.

    Squared distances between such points are ``dx^2 + dy^2 / alpha``, i.e. the
    anisotropic distance ``alpha dx^2 + dy^2`` divided by ``alpha``.
    """
    return complex(node[0], node[1] / math.sqrt(alpha))


def theta_context(grid: GridSpec, swap_nome: float = SWAP_NOME) -> ThetaContext:
    """Lattice modulus ``tau = i ly / (sqrt(alpha) lx)`` and its nome.

    If ``|q| > swap_nome`` the context of the transposed grid is returned
    (``tau -> -1/tau``) with ``swapped=True``.
    """
    tau = 1j * grid.ly / (math.sqrt(grid.alpha) * grid.lx)
    nome = nome_from_tau(tau)
    if abs(nome) > swap_nome:
        tau = -1.0 / tau
        return ThetaContext(tau=tau, nome=nome_from_tau(tau), swapped=True)
    return ThetaContext(tau=tau, nome=nome)


def r_theta_closed(s, d, grid: GridSpec, swap_nome: float = SWAP_NOME) -> float:
    """Effective resistance (ohms) from the theta-function closed form.

    This is the image sum of the far-field kernel
    :func:`~thetagrid.kernel.omega_analytic_infinite` carried out exactly::

        R = r0 sqrt(alpha) / (2 pi) * ln | C N / (theta1'(0)^2 D) |

    where ``N`` multiplies ``theta1(u(z_d - z_s'))`` and ``theta1(u(z_s - z_d'))``
    over the four images ``s'``, ``d'``; ``D`` multiplies the self factors
    ``theta1(u(z_s - z_s'))``, ``theta1(u(z_d - z_d'))`` over the three
    reflected images; ``u(z) = pi z / (2 lx)`` and
    ``ln C = ln alpha + 2 ln(2 lx / pi) + 2 gamma + ln 16 - ln(alpha + 1)``.
    Everything is accumulated as a sum of log-magnitudes.

    Parameters
    ----------
    s, d : tuple of int
        Source and drain nodes.
    grid : GridSpec
    swap_nome : float, optional
        Transpose the grid first when the nome magnitude exceeds this.
        Passing ``1.0`` disables the swap.
    """
    s = grid.check_node(s)
    d = grid.check_node(d)
    if s == d:
        return 0.0
    if theta_context(grid, swap_nome).swapped:
        s, d, grid = NodeCoord(s.y, s.x), NodeCoord(d.y, d.x), grid.transposed()
    alpha = grid.alpha
    tau = 1j * grid.ly / (math.sqrt(alpha) * grid.lx)
    scale = math.pi / (2.0 * grid.lx)

    zs = [isotropic_point(p, alpha) for p in mirror_images(s)]
    zd = [isotropic_point(p, alpha) for p in mirror_images(d)]

    log_num = (math.log(alpha) + 2.0 * math.log(2.0 * grid.lx / math.pi)
               + 2.0 * kernel.EULER_GAMMA + math.log(16.0) - math.log1p(alpha))
    for k in range(4):
        log_num += log_abs_theta1(scale * (zd[0] - zs[k]), tau)
        log_num += log_abs_theta1(scale * (zs[0] - zd[k]), tau)

    log_den = 2.0 * log_abs_theta1_prime_zero(tau)
    for k in range(1, 4):
        for value in (log_abs_theta1(scale * (zs[0] - zs[k]), tau),
                      log_abs_theta1(scale * (zd[0] - zd[k]), tau)):
            if value < _LOG_TINY:
                raise DegenerateThetaError("vanishing theta factor in denominator")
            log_den += value

    return grid.r0 * math.sqrt(alpha) / (2.0 * math.pi) * (log_num - log_den)


def _cell_range(base, radius, period):
    # integers m with |base - m * period| <= radius
    lo = math.ceil((base - radius) / period)
    hi = math.floor((base + radius) / period)
    return range(lo, hi + 1)


def image_displacements_in_ellipse(a, b, grid: GridSpec, limit: float):
    """Displacements ``a - b'`` to images ``b'`` of ``b`` inside ``alpha dx^2 + dy^2 <= limit``.

    Images are ``mirror_images(b)[family - 1] + (2 m lx, 2 n ly)``.  The result
    is ordered lexicographically by ``(m, n, family)``.
    """
    if limit < 0:
        return []
    alpha = grid.alpha
    px, py = 2 * grid.lx, 2 * grid.ly
    rx = math.sqrt(limit / alpha)
    ry = math.sqrt(limit)
    ax, ay = a
    found = []
    for family, (bx, by) in enumerate(mirror_images(b), start=1):
        base_x, base_y = ax - bx, ay - by
        for m in _cell_range(base_x, rx, px):
            dx = base_x - m * px
            adx2 = alpha * dx * dx
            if adx2 > limit:
                continue
            for n in _cell_range(base_y, ry, py):
                dy = base_y - n * py
                if adx2 + dy * dy <= limit:
                    found.append(ImageDisplacement(dx, dy, m, n, family))
    found.sort(key=lambda t: (t.m, t.n, t.family))
    return found
