"""Slow independent solvers used to cross-check the estimators.

Nothing here calls into :mod:`specbayes.estimators`. The design rows and the
observation vector are rebuilt with explicit loops, the posterior mode is
found by gradient descent instead of a Cholesky solve, and least squares uses
a hand-assembled SVD pseudo-inverse.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateDesign, NonConverged, SpectralError

MAX_DIM = 64
GRAD_TOL = 1e-10
ACCEPT_TOL = 1e-6
MAX_ITER = 10**6
SVD_RCOND = 1e-12


def _rows_and_targets(problem):
    """Design rows and matching pixel values, assembled pair by pair."""
    a_fam, b_fam = problem.known_a, problem.known_b
    obs = problem.observations.values
    rows, targets = [], []
    for a in range(len(a_fam)):
        for b in range(len(b_fam)):
            rows.append([a_fam[a].values[n] * b_fam[b].values[n] for n in range(problem.grid.count)])
            idx = [0, 0, 0]
            idx[problem.target_role.axis] = problem.target_index
            idx[a_fam.role.axis] = a
            idx[b_fam.role.axis] = b
            targets.append(obs[tuple(idx)])
    return np.array(rows, dtype=float).reshape(-1, problem.grid.count), np.array(targets, dtype=float)


def minimize_neg_log_posterior(problem, prior, max_iter: int = MAX_ITER) -> np.ndarray:
    """Mode of the posterior by steepest descent with Armijo backtracking.

    Minimizes 0.5 (e - mu)^T L (e - mu) + 0.5 beta ||x - M e||^2 starting at
    the prior mean. Trial steps use the Barzilai-Borwein length and are then
    halved until the Armijo sufficient-decrease test passes. Stops once the
    gradient's infinity norm drops below 1e-10; if the iteration cap or
    round-off stops it first, the iterate is still accepted when the gradient
    is below 1e-6.
    """
    n = problem.grid.count
    if n > MAX_DIM:
        raise SpectralError(f"oracle is limited to N <= {MAX_DIM}, got {n}")
    M, x = _rows_and_targets(problem)
    beta = problem.noise_precision
    L = np.asarray(prior.precision)
    mu = np.asarray(prior.mean)

    def gradient(e):
        return L @ (e - mu) - beta * (M.T @ (x - M @ e))

    e = mu.copy()
    g = gradient(e)
    step = 1.0 / max(np.abs(g).max(), 1.0)
    for _ in range(max_iter):
        gnorm = np.abs(g).max()
        if gnorm < GRAD_TOL:
            return e
        t = step
        while True:
            candidate = e - t * g
            g_new = gradient(candidate)
            # objective is quadratic, so its change along -g is exactly
            # -t/2 g.(g + g_new); this avoids differencing two large values
            decrease = 0.5 * t * (g @ (g + g_new))
            if decrease >= 1e-4 * t * (g @ g):
                break
            t *= 0.5
            if t * gnorm < 1e-17 * max(np.abs(e).max(), 1.0):
                if gnorm < ACCEPT_TOL:
                    return e
                raise NonConverged(f"line search stalled with gradient {gnorm:.3g}")
        s, y = candidate - e, g_new - g
        sy = s @ y
        step = (s @ s) / sy if sy > 0 else t
        e, g = candidate, g_new
    if np.abs(g).max() < ACCEPT_TOL:
        return e
    raise NonConverged(f"iteration cap {max_iter} reached with gradient {np.abs(g).max():.3g}")


def dense_least_squares(design, x) -> np.ndarray:
    """Minimum-norm least-squares solution through an explicit SVD."""
    M = np.asarray(getattr(design, "rows", design), dtype=float)
    x = np.asarray(x, dtype=float)
    if M.size == 0 or not np.any(M):
        raise DegenerateDesign("design matrix is empty or all zero")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > SVD_RCOND * s[0]
    coeffs = (U[:, keep].T @ x) / s[keep]
    return Vt[keep].T @ coeffs


def least_squares_for(problem) -> np.ndarray:
    M, x = _rows_and_targets(problem)
    return dense_least_squares(M, x)
