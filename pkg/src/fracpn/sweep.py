"""Harvesting several roots from one starting point by sweeping the order alpha."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import IterationTrace, SolveResult, SolverConfig, Status, solve
from .special import norm2

__all__ = [
    "InsufficientData",
    "RootRecord",
    "SweepConfig",
    "alpha_grid",
    "alpha_sweep",
    "collect_roots",
    "dedup_roots",
    "estimate_order",
    "sweep_solves",
]


class InsufficientData(ValueError):
    """Not enough well-behaved trace points to estimate an order."""


@dataclass(frozen=True)
class SweepConfig:
    alpha_min: float = -2.0
    alpha_max: float = 2.0
    alpha_step: float = 0.005
    integer_exclusion_radius: float = 0.01
    dedup_tol: float = 1e-4

    def __post_init__(self) -> None:
        if self.alpha_min > self.alpha_max:
            raise ValueError("alpha_min must not exceed alpha_max")
        if self.alpha_step <= 0:
            raise ValueError("alpha_step must be positive")
        if self.integer_exclusion_radius <= 0 or self.dedup_tol <= 0:
            raise ValueError("radii must be positive")


@dataclass(frozen=True)
class RootRecord:
    root: np.ndarray
    alpha: float
    residual_norm: float
    iterations: int
    step_norm: float = math.nan


def alpha_grid(cfg: SweepConfig) -> list[float]:
    """Points ``alpha_min + k * alpha_step`` up to ``alpha_max``, minus the integer bands.

    Values are rounded to 10 decimals so that e.g. ``alpha_min`` itself is
    reproduced exactly.
    """
    n = int(math.floor((cfg.alpha_max - cfg.alpha_min) / cfg.alpha_step + 1e-9))
    grid = []
    for k in range(n + 1):
        a = round(cfg.alpha_min + k * cfg.alpha_step, 10)
        if abs(a - round(a)) >= cfg.integer_exclusion_radius:
            grid.append(a)
    return grid


def _solve_at(args) -> SolveResult:
    f, x0, cfg = args
    return solve(f, x0, cfg)


def sweep_solves(
    f: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[complex],
    template: SolverConfig,
    cfg: SweepConfig,
    workers: int = 1,
) -> list[tuple[float, SolveResult]]:
    """Run one solve per grid point and return ``(alpha, result)`` pairs in grid order.

    With ``workers > 1`` the solves fan out to a process pool; ``f`` must then
    be picklable.
    """
    grid = alpha_grid(cfg)
    jobs = [(f, x0, template.with_alpha(a)) for a in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_at, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_solve_at(job) for job in jobs]
    return list(zip(grid, results))


def collect_roots(
    solves: Sequence[tuple[float, SolveResult]], dedup_tol: float
) -> list[RootRecord]:
    records = [
        RootRecord(r.root, a, r.residual_norm, r.iterations, r.step_norm)
        for a, r in sorted(solves, key=lambda p: p[0])
        if r.status is Status.CONVERGED
    ]
    return dedup_roots(records, dedup_tol)


def alpha_sweep(
    f: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[complex],
    template: SolverConfig,
    cfg: SweepConfig = SweepConfig(),
    workers: int = 1,
) -> list[RootRecord]:
    """Distinct roots reached from ``x0`` over the alpha grid, sorted by alpha.

    Runs that do not converge are dropped.
    """
    return collect_roots(sweep_solves(f, x0, template, cfg, workers), cfg.dedup_tol)


def dedup_roots(records: Sequence[RootRecord], dedup_tol: float) -> list[RootRecord]:
    """Merge records whose roots lie within ``dedup_tol`` of each other.

    Records are processed in order of arrival; a record joining two existing
    clusters fuses them, so the result is single-linkage clustering and the
    survivors are pairwise more than ``dedup_tol`` apart.  Each cluster is
    represented by its smallest-residual member (earliest on ties).  Complex
    conjugate roots are different points and stay separate.
    """
    clusters: list[list[RootRecord]] = []
    for rec in records:
        hits = [
            c for c in clusters
            if any(norm2(rec.root - other.root) <= dedup_tol for other in c)
        ]
        merged = [m for c in hits for m in c] + [rec]
        clusters = [c for c in clusters if not any(c is h for h in hits)]
        clusters.append(merged)

    reps = [min(c, key=lambda r: r.residual_norm) for c in clusters]
    return sorted(reps, key=lambda r: r.alpha)


def estimate_order(trace: IterationTrace | Sequence[float]) -> float:
    """Empirical order of convergence from successive step norms.

    Fits ``log e[i+1] = p log e[i] + c`` by least squares over the last
    ``max(4, ceil(n/4))`` step norms and returns ``p``.  Accepts a trace from
    :func:`solve` or a plain sequence of step norms.

    Raises
    ------
    InsufficientData
        Fewer than four usable points, or step norms in the tail that are not
        strictly decreasing and positive.
    """
    steps = trace.step_norms if isinstance(trace, IterationTrace) else trace
    e = np.array([s for s in steps if math.isfinite(s)], dtype=float)
    if e.size < 4:
        raise InsufficientData(f"need at least 4 step norms, got {e.size}")
    tail = e[-max(4, math.ceil(e.size / 4)):]
    if np.any(tail <= 0) or np.any(np.diff(tail) >= 0):
        raise InsufficientData("step norms in the tail are not strictly decreasing")
    slope, _ = np.polyfit(np.log(tail[:-1]), np.log(tail[1:]), 1)
    return float(slope)
