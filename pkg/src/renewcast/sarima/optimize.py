"""Derivative-free Nelder-Mead simplex minimizer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    evaluations: int


def _safe(objective, x):
    value = float(objective(x))
    # NaN would poison the ordering; treat it like an infeasible point
    return np.inf if np.isnan(value) else value


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0,
    step=0.25,
    f_tol: float = 1e-8,
    x_tol: float = 1e-8,
    max_iter: int | None = None,
) -> SimplexResult:
    """Minimize ``objective`` starting from ``x0``.

    Parameters
    ----------
    objective : callable
        Maps a 1-d array to a float. May return ``+inf`` for infeasible
        points; the simplex then contracts away from them.
    x0 : array_like
        Starting vertex. The other vertices are ``x0 + step_i * e_i``.
    step : float or array_like
        Initial edge length, scalar or one per coordinate.
    f_tol, x_tol : float
        Stop once both the spread of objective values across the simplex
        and the largest coordinate distance from the best vertex are within
        tolerance.
    max_iter : int, optional
        Iteration cap, ``500 * dim`` by default.

    Returns
    -------
    SimplexResult
        Best vertex, its value, and whether a tolerance (rather than the
        iteration cap) ended the search.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dim = x0.size
    if max_iter is None:
        max_iter = 500 * max(dim, 1)
    steps = np.broadcast_to(np.asarray(step, dtype=float), (dim,))

    simplex = np.empty((dim + 1, dim))
    simplex[0] = x0
    for i in range(dim):
        simplex[i + 1] = x0
        simplex[i + 1, i] += steps[i] if steps[i] != 0 else 0.00025
    fvals = np.array([_safe(objective, v) for v in simplex])
    evals = dim + 1

    if dim == 0:
        return SimplexResult(x0, float(fvals[0]), True, 0, evals)

    converged = False
    it = 0
    while it < max_iter:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]

        f_spread = fvals[-1] - fvals[0]
        if np.isinf(fvals[0]) and np.isinf(fvals[-1]):
            f_spread = np.inf
        x_spread = np.max(np.abs(simplex[1:] - simplex[0]))
        if f_spread <= f_tol and x_spread <= x_tol:
            converged = True
            break
        it += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = _safe(objective, xr)
        evals += 1

        if fr < fvals[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = _safe(objective, xe)
            evals += 1
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue

        if fr < fvals[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
        else:
            xc = centroid + CONTRACT * (worst - centroid)
        fc = _safe(objective, xc)
        evals += 1
        if fc < min(fr, fvals[-1]):
            simplex[-1], fvals[-1] = xc, fc
            continue

        best = simplex[0]
        for i in range(1, dim + 1):
            simplex[i] = best + SHRINK * (simplex[i] - best)
            fvals[i] = _safe(objective, simplex[i])
        evals += dim

    i_best = int(np.argmin(fvals))
    return SimplexResult(simplex[i_best].copy(), float(fvals[i_best]), converged, it, evals)
