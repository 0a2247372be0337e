"""Error maps against the Laplacian oracle and the cache benchmark."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .correction import (DEFAULT_HYBRID, CacheStats, CorrectionCache, HybridConfig,
                         r_finite_hybrid)
from .finite_grid import GridSpec, NodeCoord, r_theta_closed
from .oracle import all_resistances_from

__all__ = ["ErrorMapReport", "BenchReport", "error_map", "bench", "METHODS"]

METHODS = ("theta", "hybrid")


@dataclass
class ErrorMapReport:
    grid: GridSpec
    source: NodeCoord
    method: str
    per_node: list  # (x, y, r_method, r_oracle, rel_error), row-major, source omitted
    mean_rel_error: float
    max_rel_error: float
    max_error_node: NodeCoord
    cache: CacheStats | None
    wall_time_ms: float

    def axis_split(self):
        """Largest relative error on the source's row/column and elsewhere."""
        sx, sy = self.source
        on = [e for x, y, _, _, e in self.per_node if x == sx or y == sy]
        off = [e for x, y, _, _, e in self.per_node if x != sx and y != sy]
        return max(on, default=0.0), max(off, default=0.0)

    def summary(self) -> dict:
        on_axis, off_axis = self.axis_split()
        return {
            "grid": {"lx": self.grid.lx, "ly": self.grid.ly,
                     "r_h": self.grid.r_h, "r_v": self.grid.r_v, "alpha": self.grid.alpha},
            "source": list(self.source),
            "method": self.method,
            "nodes": len(self.per_node),
            "mean_rel_error": self.mean_rel_error,
            "max_rel_error": self.max_rel_error,
            "max_error_node": list(self.max_error_node),
            "max_on_axis_rel_error": on_axis,
            "max_off_axis_rel_error": off_axis,
            "cache": None if self.cache is None else self.cache._asdict(),
            "wall_time_ms": self.wall_time_ms,
        }


def error_map(grid: GridSpec, source, method="hybrid", cache: CorrectionCache | None = None,
              cfg: HybridConfig = DEFAULT_HYBRID, oracle=None) -> ErrorMapReport:
    """Relative error of ``method`` against the oracle for every node but the source.

    ``oracle`` may pass precomputed resistances from the source (``[y, x]``
    array) so several methods can share one factorisation.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    source = grid.check_node(source)
    if oracle is None:
        oracle = all_resistances_from(source, grid)
    if method == "hybrid" and cache is None:
        cache = cfg.new_cache()

    start = time.perf_counter()
    rows = []
    for node in grid.nodes():
        if node == source:
            continue
        if method == "hybrid":
            value = r_finite_hybrid(source, node, grid, cache, cfg).resistance_ohms
        else:
            value = r_theta_closed(source, node, grid)
        ref = float(oracle[node.y, node.x])
        rows.append((node.x, node.y, value, ref, abs(value - ref) / ref))
    elapsed = 1e3 * (time.perf_counter() - start)

    errors = np.array([r[4] for r in rows])
    worst = int(np.argmax(errors))
    return ErrorMapReport(
        grid=grid, source=source, method=method, per_node=rows,
        mean_rel_error=float(errors.mean()), max_rel_error=float(errors[worst]),
        max_error_node=NodeCoord(rows[worst][0], rows[worst][1]),
        cache=cache.stats() if cache is not None else None, wall_time_ms=elapsed)


@dataclass
class BenchReport:
    queries: int
    total_time_s: float
    mean_latency_ms: float
    p99_latency_ms: float
    hit_rate: float
    hit_rate_after_warmup: float
    unique_integrations: int
    values: np.ndarray = field(repr=False)

    def summary(self) -> dict:
        return {
            "queries": self.queries,
            "total_time_s": self.total_time_s,
            "mean_latency_ms": self.mean_latency_ms,
            "p99_latency_ms": self.p99_latency_ms,
            "hit_rate": self.hit_rate,
            "hit_rate_after_warmup": self.hit_rate_after_warmup,
            "unique_integrations": self.unique_integrations,
            "resistance_sum": float(self.values.sum()),
        }


def bench(grid: GridSpec, queries: int, seed: int = 0, cfg: HybridConfig = DEFAULT_HYBRID,
          cache: CorrectionCache | None = None) -> BenchReport:
    """Random hybrid queries on ``grid``; the query sequence depends only on ``seed``.

    The first tenth of the queries counts as warm-up for
    ``hit_rate_after_warmup``.
    """
    if queries < 0:
        raise ValueError("queries must be non-negative")
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, grid.lx, size=(queries, 2))
    ys = rng.integers(0, grid.ly, size=(queries, 2))
    if cache is None:
        cache = cfg.new_cache()
    warmup = queries // 10
    latencies = np.zeros(queries)
    values = np.zeros(queries)
    after_warmup = None

    start = time.perf_counter()
    for i in range(queries):
        if i == warmup:
            after_warmup = cache.stats()
        t0 = time.perf_counter()
        s = (int(xs[i, 0]), int(ys[i, 0]))
        d = (int(xs[i, 1]), int(ys[i, 1]))
        values[i] = r_finite_hybrid(s, d, grid, cache, cfg).resistance_ohms
        latencies[i] = time.perf_counter() - t0
    total = time.perf_counter() - start

    final = cache.stats()
    if after_warmup is None:
        after_warmup = final
    late_hits = final.hits - after_warmup.hits
    late_total = late_hits + final.misses - after_warmup.misses
    return BenchReport(
        queries=queries,
        total_time_s=total,
        mean_latency_ms=1e3 * float(latencies.mean()) if queries else 0.0,
        p99_latency_ms=1e3 * float(np.percentile(latencies, 99)) if queries else 0.0,
        hit_rate=final.hit_rate,
        hit_rate_after_warmup=late_hits / late_total if late_total else 0.0,
        unique_integrations=final.misses,
        values=values,
    )
