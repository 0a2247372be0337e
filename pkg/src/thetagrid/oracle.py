"""Ground-truth resistances from the grid's graph Laplacian, and SPICE netlist export.

Nodes are numbered row-major, ``index = y * lx + x``.  Horizontal edges have
conductance ``1/r_h``, vertical edges ``1/r_v``; the insulating boundary is
simply the absence of edges beyond the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .finite_grid import GridSpec

__all__ = [
    "DENSE_LIMIT",
    "OracleSolution",
    "SolverError",
    "all_resistances_from",
    "build_laplacian",
    "emit_netlist",
    "node_index",
    "oracle_solve",
    "r_oracle",
]

#: Largest node count handled with dense linear algebra.
DENSE_LIMIT = 3000
_REFINEMENTS = 8
_CG_RTOL = 1e-8


class SolverError(RuntimeError):
    """The linear solve missed its residual tolerance."""


@dataclass(frozen=True)
class OracleSolution:
    resistance_ohms: float
    method: str
    residual_norm: float


def node_index(node, grid: GridSpec) -> int:
    return node[1] * grid.lx + node[0]


def build_laplacian(grid: GridSpec) -> scipy.sparse.csr_matrix:
    """Weighted Laplacian of the ``lx`` x ``ly`` four-neighbour lattice (sparse CSR)."""
    lx, ly = grid.lx, grid.ly
    idx = np.arange(lx * ly).reshape(ly, lx)
    gh, gv = 1.0 / grid.r_h, 1.0 / grid.r_v
    heads = [idx[:, :-1].ravel(), idx[:-1, :].ravel()]
    tails = [idx[:, 1:].ravel(), idx[1:, :].ravel()]
    weights = [np.full(heads[0].size, gh), np.full(heads[1].size, gv)]
    i = np.concatenate(heads)
    j = np.concatenate(tails)
    w = np.concatenate(weights)
    n = lx * ly
    adj = scipy.sparse.coo_matrix((w, (i, j)), shape=(n, n))
    adj = (adj + adj.T).tocsr()
    degree = np.asarray(adj.sum(axis=1)).ravel()
    return (scipy.sparse.diags(degree) - adj).tocsr()


def _apply_stencil(v, grid: GridSpec, dtype=np.longdouble):
    # L v on the node grid in extended precision, for residuals below double rounding
    u = np.asarray(v, dtype=dtype).reshape(grid.ly, grid.lx)
    out = np.zeros_like(u)
    gh, gv = dtype(1.0) / dtype(grid.r_h), dtype(1.0) / dtype(grid.r_v)
    h = gh * (u[:, :-1] - u[:, 1:])
    out[:, :-1] += h
    out[:, 1:] -= h
    w = gv * (u[:-1, :] - u[1:, :])
    out[:-1, :] += w
    out[1:, :] -= w
    return out.ravel()


def _residual_vector(grid, v, s_idx, d_idx):
    r = _apply_stencil(v, grid)
    r[s_idx] -= 1
    r[d_idx] += 1
    return r


def _residual(grid, v, s_idx, d_idx):
    return float(np.linalg.norm(_residual_vector(grid, v, s_idx, d_idx)))


def oracle_solve(s, d, grid: GridSpec, tol=1e-12, method=None) -> OracleSolution:
    """Two-point resistance by grounding ``d`` and solving for the potential.

    Parameters
    ----------
    method : {"grounded-direct", "dense-pseudo-inverse", "iterative"}, optional
        Default: direct for at most :data:`DENSE_LIMIT` nodes, otherwise
        Jacobi-preconditioned conjugate gradients.

    Raises
    ------
    SolverError
        If ``||L v - (e_s - e_d)|| > tol * sqrt(2)``.
    """
    s = grid.check_node(s)
    d = grid.check_node(d)
    if s == d:
        return OracleSolution(0.0, "trivial", 0.0)
    n = grid.node_count
    if method is None:
        method = "grounded-direct" if n <= DENSE_LIMIT else "iterative"
    lap = build_laplacian(grid)
    si, di = node_index(s, grid), node_index(d, grid)

    if method == "dense-pseudo-inverse":
        pinv = _dense_pinv(lap)
        e = np.zeros(n)
        e[si], e[di] = 1.0, -1.0
        v = pinv @ e
        value = float(e @ v)
        v = v - v[di]
    else:
        keep = np.r_[0:di, di + 1:n]
        reduced = lap[keep][:, keep]
        rhs = np.zeros(n - 1)
        rhs[si if si < di else si - 1] = 1.0
        if method == "grounded-direct":
            x = scipy.linalg.solve(reduced.toarray(), rhs, assume_a="pos")
        elif method == "iterative":
            inv_diag = 1.0 / reduced.diagonal()
            precond = scipy.sparse.linalg.LinearOperator(
                reduced.shape, matvec=lambda r: inv_diag * r)
            x = np.zeros(n - 1)
            # mixed-precision refinement on the residual of the full system; the
            # grounded row's residual is minus the sum of all the others
            for _ in range(_REFINEMENTS):
                full = _residual_vector(grid, np.insert(x, di, 0.0), si, di)
                if np.linalg.norm(full) <= 0.5 * tol:
                    break
                r = -np.delete(full, di).astype(float)
                dx, info = scipy.sparse.linalg.cg(reduced, r, rtol=_CG_RTOL, atol=0.0,
                                                  maxiter=20 * n, M=precond)
                if info != 0:
                    raise SolverError(f"conjugate gradients stopped with info={info}")
                x += dx
        else:
            raise ValueError(f"unknown oracle method {method!r}")
        v = np.insert(x, di, 0.0)
        value = float(v[si])

    res = _residual(grid, v, si, di)
    if not res <= tol * math.sqrt(2.0):
        raise SolverError(f"residual {res:.3g} exceeds tolerance {tol:.3g}")
    return OracleSolution(value, method, res)


def r_oracle(s, d, grid: GridSpec, tol=1e-12, method=None) -> float:
    """Effective resistance in ohms between two nodes (see :func:`oracle_solve`)."""
    return oracle_solve(s, d, grid, tol, method).resistance_ohms


def _dense_pinv(lap):
    # L+ = (L + J/n)^-1 - J/n for a connected graph
    n = lap.shape[0]
    shifted = lap.toarray() + 1.0 / n
    factor = scipy.linalg.cho_factor(shifted)
    inv = scipy.linalg.cho_solve(factor, np.eye(n))
    return inv - 1.0 / n


def _path_modes(n, conductance):
    # eigenpairs of the free-end path Laplacian: cosine modes at half-integer sites
    j = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    modes = np.sqrt(2.0 / n) * np.cos(np.pi * j * (x + 0.5) / n)
    modes[0] = 1.0 / math.sqrt(n)
    eig = conductance * (2.0 - 2.0 * np.cos(np.pi * np.arange(n) / n))
    return modes, eig


def _spectral_from(s, grid):
    px, ex = _path_modes(grid.lx, 1.0 / grid.r_h)
    py, ey = _path_modes(grid.ly, 1.0 / grid.r_v)
    lam = ex[:, None] + ey[None, :]
    weight = np.zeros_like(lam)
    weight[lam > 0] = 1.0 / lam[lam > 0]
    weight[0, 0] = 0.0
    a = px[:, s[0]]
    b = py[:, s[1]]
    self_term = float(a ** 2 @ weight @ b ** 2)
    diag = (px ** 2).T @ weight @ (py ** 2)
    cross = (a[:, None] * px).T @ weight @ (b[:, None] * py)
    r = self_term + diag - 2.0 * cross
    r[s[0], s[1]] = 0.0
    return np.maximum(r, 0.0).T


def all_resistances_from(s, grid: GridSpec, method=None) -> np.ndarray:
    """Resistances from ``s`` to every node, as an array indexed ``[y, x]``.

    ``method="dense-pseudo-inverse"`` forms the Laplacian pseudo-inverse
    ``G`` once and uses ``R(s, t) = G_ss + G_tt - 2 G_st``.  ``"spectral"``
    uses the same identity with ``G`` expanded in the separable cosine
    eigenbasis of the rectangular grid, which needs no matrix of size
    ``N x N`` and is the default above :data:`DENSE_LIMIT` nodes.
    """
    s = grid.check_node(s)
    if method is None:
        method = "dense-pseudo-inverse" if grid.node_count <= DENSE_LIMIT else "spectral"
    if method == "spectral":
        return _spectral_from(s, grid)
    if method != "dense-pseudo-inverse":
        raise ValueError(f"unknown batch oracle method {method!r}")
    pinv = _dense_pinv(build_laplacian(grid))
    i = node_index(s, grid)
    r = pinv[i, i] + np.diag(pinv) - 2.0 * pinv[i]
    r[i] = 0.0
    return r.reshape(grid.ly, grid.lx)


def _fmt(value):
    text = f"{float(value):.12g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def emit_netlist(grid: GridSpec, s, d) -> str:
    """SPICE netlist of the grid with a 1 A source driving ``s`` against grounded ``d``.

    Resistor cards come in row-major node order, each node's horizontal edge
    (``RH_x_y``) before its vertical one (``RV_x_y``).
    """
    s = grid.check_node(s)
    d = grid.check_node(d)
    if s == d:
        raise ValueError("netlist needs distinct source and drain nodes")

    def name(x, y):
        return f"n_{x}_{y}"

    rh, rv = _fmt(grid.r_h), _fmt(grid.r_v)
    lines = [f"* resistor grid {grid.lx}x{grid.ly} r_h={rh} r_v={rv} "
             f"source={s.x},{s.y} drain={d.x},{d.y}"]
    for y in range(grid.ly):
        for x in range(grid.lx):
            if x + 1 < grid.lx:
                lines.append(f"RH_{x}_{y} {name(x, y)} {name(x + 1, y)} {rh}")
            if y + 1 < grid.ly:
                lines.append(f"RV_{x}_{y} {name(x, y)} {name(x, y + 1)} {rv}")
    src, drn = name(*s), name(*d)
    lines += [
        f"IDRIVE {drn} {src} DC 1",
        f"VGND {drn} 0 DC 0",
        ".OP",
        f".PRINT DC V({src})",
        ".END",
    ]
    return "\n".join(lines) + "\n"
