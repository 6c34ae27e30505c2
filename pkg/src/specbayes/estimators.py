"""Estimating one unknown spectrum from pixel values and two known families.

Three routes share one problem description:

* :func:`least_squares_estimate` - minimum-norm least squares;
* :func:`bayes_estimate` - conjugate Gaussian posterior (same code for every
  role, only the choice of known families differs);
* the basis-constrained baseline in :mod:`specbayes.jiang`.

Each estimate is max-normalized before it is returned, since the imaging
pipeline only determines a spectrum up to a global scale.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy import linalg

from .core import (
    DesignMatrix,
    GaussianBelief,
    Observations,
    Role,
    Spectrum,
    SpectrumSet,
    build_design_matrix,
)
from .errors import (
    DegenerateDesign,
    DegenerateMean,
    GridMismatch,
    NoConfidenceAvailable,
    NonPositivePosterior,
    RoleConflict,
    SpectralError,
)

DEFAULT_BETA = 1e4
LSQ_RCOND = 1e-12
JITTER_START = 1e-12
JITTER_STOP = 1e-6


class Method(enum.Enum):
    LEAST_SQUARES = "lsq"
    BAYES = "bayes"
    JIANG_BASIS = "jiang"


@dataclass(frozen=True, eq=False)
class EstimationProblem:
    """Recover member ``target_index`` of the ``target_role`` family.

    ``known_a`` and ``known_b`` are the two other families. Observation rows
    are gathered in the same (a, b) order as the design matrix rows.
    """

    target_role: Role
    target_index: int
    known_a: SpectrumSet
    known_b: SpectrumSet
    observations: Observations
    noise_precision: float = DEFAULT_BETA

    def __post_init__(self):
        object.__setattr__(self, "target_role", Role.parse(self.target_role))
        roles = {self.target_role, self.known_a.role, self.known_b.role}
        if len(roles) != 3:
            raise RoleConflict(
                f"known families ({self.known_a.role.value}, {self.known_b.role.value}) "
                f"must be the two roles other than {self.target_role.value}"
            )
        if self.known_a.grid != self.known_b.grid:
            raise GridMismatch(self.known_a.grid, self.known_b.grid)
        if not np.isfinite(self.noise_precision) or self.noise_precision <= 0:
            raise SpectralError(f"noise precision must be positive, got {self.noise_precision}")
        extents = self.observations.extents
        for family in (self.known_a, self.known_b):
            if extents[family.role.axis] != len(family):
                raise SpectralError(
                    f"observations have {extents[family.role.axis]} {family.role.value} entries "
                    f"but {len(family)} known spectra were given"
                )
        if not 0 <= self.target_index < extents[self.target_role.axis]:
            raise SpectralError(
                f"target index {self.target_index} outside the {self.target_role.value} "
                f"extent {extents[self.target_role.axis]}"
            )

    @property
    def grid(self):
        return self.known_a.grid

    @cached_property
    def design(self) -> DesignMatrix:
        return build_design_matrix(self.known_a, self.known_b)

    @cached_property
    def observation_vector(self) -> np.ndarray:
        x = np.take(self.observations.values, self.target_index, axis=self.target_role.axis)
        # remaining axes keep their relative order; transpose if known_a comes later
        if self.known_a.role.axis > self.known_b.role.axis:
            x = x.T
        x = np.ascontiguousarray(x).ravel()
        x.setflags(write=False)
        return x

    def with_observations(self, observations: Observations) -> "EstimationProblem":
        return EstimationProblem(self.target_role, self.target_index, self.known_a,
                                 self.known_b, observations, self.noise_precision)


@dataclass(frozen=True, eq=False)
class Estimate:
    """Max-normalized estimate plus, for the Bayesian route, the posterior.

    ``raw`` keeps the unnormalized solution (least-squares solution, posterior
    mean, or basis reconstruction).
    """

    normalized: Spectrum
    method: Method
    raw: np.ndarray
    posterior: GaussianBelief | None = None


def normalize(values) -> np.ndarray:
    """Divide by the largest element. Negative entries are kept as they are."""
    values = np.asarray(values, dtype=float)
    peak = values.max()
    if not peak > 0:
        raise DegenerateMean(f"cannot max-normalize: largest element is {peak}")
    out = values / peak
    # guard the peak against a rounding step away from exactly 1
    out[np.argmax(values)] = 1.0
    return out


def _as_estimate(problem: EstimationProblem, raw: np.ndarray, method: Method,
                 posterior: GaussianBelief | None = None) -> Estimate:
    spectrum = Spectrum(problem.grid, normalize(raw), problem.target_role,
                        label=f"{method.value} estimate", bounded=False)
    raw = np.array(raw, dtype=float)
    raw.setflags(write=False)
    return Estimate(spectrum, method, raw, posterior)


def least_squares_solution(problem: EstimationProblem) -> np.ndarray:
    """Minimum-norm minimizer of ``||x - M v||^2`` (unnormalized)."""
    M = problem.design.rows
    if M.shape[0] == 0 or not np.any(M):
        raise DegenerateDesign("design matrix is empty or all zero")
    v, *_ = np.linalg.lstsq(M, problem.observation_vector, rcond=LSQ_RCOND)
    return v


def least_squares_estimate(problem: EstimationProblem) -> Estimate:
    return _as_estimate(problem, least_squares_solution(problem), Method.LEAST_SQUARES)


def _cholesky_with_jitter(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky factor of ``A``, adding diagonal jitter only if needed.

    Returns the factor and the matrix actually factorized.
    """
    try:
        return linalg.cholesky(A, lower=True), A
    except linalg.LinAlgError:
        pass
    n = A.shape[0]
    scale = np.trace(A) / n
    if not scale > 0:
        raise NonPositivePosterior("posterior precision has non-positive trace")
    jitter = JITTER_START
    while jitter <= JITTER_STOP * (1 + 1e-9):
        shifted = A + jitter * scale * np.eye(n)
        try:
            return linalg.cholesky(shifted, lower=True), shifted
        except linalg.LinAlgError:
            jitter *= 10
    raise NonPositivePosterior(
        f"posterior precision not positive definite even with jitter {JITTER_STOP:g}*trace/N"
    )


def bayes_posterior(problem: EstimationProblem, prior: GaussianBelief) -> GaussianBelief:
    """Conjugate update of a Gaussian prior with the problem's observations.

    precision = prior precision + beta * M^T M
    mean      = precision^-1 (prior precision @ prior mean + beta * M^T x)
    """
    M = problem.design.rows
    if prior.dim != M.shape[1]:
        raise SpectralError(f"prior has dimension {prior.dim}, grid has {M.shape[1]} samples")
    if M.shape[0] == 0:
        return prior
    beta = problem.noise_precision
    x = problem.observation_vector
    precision = prior.precision + beta * (M.T @ M)
    precision = 0.5 * (precision + precision.T)
    rhs = prior.precision @ prior.mean + beta * (M.T @ x)
    factor, precision = _cholesky_with_jitter(precision)
    mean = linalg.cho_solve((factor, True), rhs)
    return GaussianBelief(mean, precision)


def bayes_estimate(problem: EstimationProblem, prior: GaussianBelief) -> Estimate:
    posterior = bayes_posterior(problem, prior)
    return _as_estimate(problem, posterior.mean, Method.BAYES, posterior)


def sequential_update(prior: GaussianBelief, problems: Iterable[EstimationProblem]) -> GaussianBelief:
    """Fold observation batches in order, each posterior becoming the next prior."""
    problems = list(problems)
    if problems:
        first = problems[0]
        for p in problems[1:]:
            if p.grid != first.grid:
                raise GridMismatch(first.grid, p.grid)
            if p.target_role is not first.target_role:
                raise RoleConflict("sequential problems must share the target role")
    belief = prior
    for p in problems:
        belief = bayes_posterior(p, belief)
    return belief


def confidence(estimate: Estimate) -> np.ndarray:
    """Posterior precision of the unnormalized mean."""
    if estimate.method is not Method.BAYES or estimate.posterior is None:
        raise NoConfidenceAvailable(f"{estimate.method.value} estimates carry no posterior")
    return estimate.posterior.precision


def rmse(estimate, truth, normalized: bool = True) -> float:
    """Root mean squared error over the wavelength samples.

    With ``normalized`` both inputs are max-normalized first, which is how
    every method is scored.
    """
    a = estimate.values if isinstance(estimate, Spectrum) else np.asarray(estimate, dtype=float)
    b = truth.values if isinstance(truth, Spectrum) else np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise SpectralError(f"shape mismatch {a.shape} vs {b.shape}")
    if normalized:
        a, b = normalize(a), normalize(b)
    return float(np.sqrt(np.mean((a - b) ** 2)))
