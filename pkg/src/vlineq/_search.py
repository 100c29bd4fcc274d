"""Parameter grids and per-coordinate grid search with ternary refinement.

Every definitional infimum/supremum in the package reduces to the same
pattern: evaluate a one-parameter family on a grid for all coordinates at
once, keep the best node per coordinate, then shrink a bracket around that
node by ternary search. The families involved are convex (or concave, for
suprema) in the searched parameter on the bracket, so ternary search is
sound there.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

LOG10_THETA_MIN = -6.0
LOG10_THETA_MAX = 6.0
# Bound on |log theta| when refinement leaves the grid through an end node;
# keeps exp() finite while letting unattained limits (zero coordinates) be
# approached far past the grid.
LOG_THETA_BOUND = 600.0
# Spacing of the final polishing lattice, in parameter units (log-theta or radians).
POLISH_STEP = 2.0**-20


def log_theta_grid(points: int) -> np.ndarray:
    """Natural-log nodes of a log-spaced grid over [1e-6, 1e6].

    The grid has ``points`` equal log-intervals, hence ``points + 1`` nodes.
    Nodes are computed as ``lo + span * k / points`` so the grid for
    ``2 * points`` contains every node of the grid for ``points`` bit-for-bit.
    """
    if points < 1:
        raise ValueError("theta grid needs at least one interval")
    k = np.arange(points + 1, dtype=float)
    span = LOG10_THETA_MAX - LOG10_THETA_MIN
    log10_nodes = LOG10_THETA_MIN + (span * k) / points
    return log10_nodes * np.log(10.0)


def angle_grid(points: int) -> np.ndarray:
    """``points`` equally spaced angles on [0, 2*pi), nested under doubling."""
    if points < 1:
        raise ValueError("angle grid needs at least one point")
    k = np.arange(points, dtype=float)
    return (2.0 * np.pi * k) / points


def grid_minimize(
    fun: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    iters: int,
    *,
    periodic: bool = False,
    period: float = 2.0 * np.pi,
    extend: float | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize a coordinatewise family over ``grid`` and refine.

    ``fun`` takes parameters of shape ``(dim, k)`` and returns family values
    of the same shape; row ``j`` is the family for coordinate ``j``. The
    returned pair is ``(values, params)``, each of shape ``(dim,)``.

    The value reported per coordinate is the minimum over all grid nodes and
    a few points of a fixed polishing lattice next to the ternary-search
    limit. Since the polishing points do not depend on the grid once the
    bracket has converged, a grid that contains another grid's nodes never
    yields a worse value.

    With ``extend``, a coordinate whose best node is an end node of a
    non-periodic grid is refined on ``[second node, extend]`` (or the mirror
    bracket): for a convex family the minimizer then lies beyond the grid.
    ``extend`` may be an array giving one bound per coordinate.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _grid_minimize(fun, grid, iters, periodic, period, extend)


def _grid_minimize(fun, grid, iters, periodic, period, extend):
    grid = np.asarray(grid, dtype=float)
    probe = fun(grid[np.newaxis, :])
    dim = probe.shape[0]
    idx = np.argmin(probe, axis=1)
    rows = np.arange(dim)
    best_val = probe[rows, idx]
    best_par = grid[idx]
    if iters <= 0 or grid.size < 2:
        return best_val, best_par

    if periodic:
        step = period / grid.size
        lo = best_par - step
        hi = best_par + step
    else:
        lo = grid[np.maximum(idx - 1, 0)]
        hi = grid[np.minimum(idx + 1, grid.size - 1)]
        if extend is not None:
            extend = np.broadcast_to(np.asarray(extend, dtype=float), (dim,))
            lo = np.where(idx == 0, -extend, lo)
            hi = np.where(idx == grid.size - 1, extend, hi)

    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        vals = fun(np.stack([m1, m2], axis=1))
        left = vals[:, 0] < vals[:, 1]
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)

    # Snap onto a fixed lattice so the refined value does not depend on the
    # grid that seeded the bracket; four neighbours cover a straddled node.
    base = np.floor(0.5 * (lo + hi) / POLISH_STEP)
    cand = (base[:, None] + np.arange(-1.0, 3.0)[None, :]) * POLISH_STEP
    if not periodic:
        if extend is None:
            cand = np.clip(cand, grid[0], grid[-1])
        else:
            cand = np.clip(cand, -extend[:, None], extend[:, None])
    cand_val = fun(cand)
    j = np.argmin(cand_val, axis=1)
    ref_val = cand_val[rows, j]
    ref_par = cand[rows, j]
    better = ref_val < best_val
    return np.where(better, ref_val, best_val), np.where(better, ref_par, best_par)


def grid_maximize(
    fun: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    iters: int,
    *,
    periodic: bool = False,
    period: float = 2.0 * np.pi,
    extend: float | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Supremum counterpart of :func:`grid_minimize`."""
    vals, pars = grid_minimize(
        lambda x: -fun(x), grid, iters, periodic=periodic, period=period, extend=extend
    )
    return -vals, pars
