"""Basis-constrained least squares for camera sensitivity (Jiang-style baseline).

The unknown channel response is restricted to ``mean + basis @ w`` with a
handful of principal components (two by default) learnt from a camera
database, and ``w`` is fitted to the pixel values by ordinary least squares.
This is a reduced reconstruction: the original method's extra machinery is
not reproduced.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .core import Role, Spectrum
from .errors import DegenerateDesign, MethodScopeError, SpectralError
from .estimators import Estimate, EstimationProblem, Method, _as_estimate

DEFAULT_COMPONENTS = 2


def jiang_estimate(problem: EstimationProblem, mean: Spectrum, basis) -> Estimate:
    if problem.target_role is not Role.SENSITIVITY:
        raise MethodScopeError(
            "the basis-constrained baseline only estimates camera sensitivity; "
            f"it is not designed for {problem.target_role.value}"
        )
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    n = problem.grid.count
    if basis.shape[0] != n or basis.shape[1] < 1:
        raise SpectralError(f"basis must be N x B with N={n}, B>=1; got {basis.shape}")
    if mean.grid != problem.grid:
        raise SpectralError("mean spectrum is not on the problem grid")

    M = problem.design.rows
    A = M @ basis
    residual = problem.observation_vector - M @ mean.values
    gram = A.T @ A
    try:
        factor = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError:
        raise DegenerateDesign("reduced normal equations are singular") from None
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 1e-12 * eig[-1]:
        raise DegenerateDesign(f"reduced normal equations are rank deficient (eigenvalues {eig})")
    w = linalg.cho_solve((factor, True), A.T @ residual)
    return _as_estimate(problem, mean.values + basis @ w, Method.JIANG_BASIS)
