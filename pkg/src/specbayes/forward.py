"""Imaging pipeline: pixel values from illumination, reflectance and sensitivity.

A pixel is the wavelength sum of the three sampled spectra multiplied
together. Simulation noise is drawn per observation from a counter-based
generator keyed on ``(seed, i, j, k)``, so any subset of the tensor can be
regenerated independently and in any order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import GridMismatch, Observations, Role, Spectrum, SpectrumSet
from .errors import RoleConflict, SpectralError


class NoiseKind(enum.Enum):
    NONE = "none"
    ADDITIVE_GAUSSIAN = "additive_gaussian"


@dataclass(frozen=True)
class NoiseModel:
    """Additive pixel noise for simulation.

    ``sigma`` is the standard deviation of the noise. Its inverse square is
    the natural likelihood precision for the Bayesian estimator (see
    :meth:`precision`). Noisy values are not clipped.
    """

    kind: NoiseKind = NoiseKind.NONE
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise SpectralError(f"noise sigma must be a finite non-negative number, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise SpectralError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @classmethod
    def gaussian(cls, sigma: float, seed: int = 0) -> "NoiseModel":
        if sigma == 0:
            return cls(NoiseKind.NONE, 0.0, seed)
        return cls(NoiseKind.ADDITIVE_GAUSSIAN, float(sigma), seed)

    @property
    def is_noiseless(self) -> bool:
        return self.kind is NoiseKind.NONE or self.sigma == 0

    def precision(self, default: float = 1e4) -> float:
        """Likelihood precision 1/sigma**2, or ``default`` when noiseless."""
        if self.is_noiseless:
            return default
        return 1.0 / self.sigma**2

    def sample(self, i: int, j: int, k: int) -> float:
        """Noise term for observation (i, j, k)."""
        if self.is_noiseless:
            return 0.0
        bits = np.random.Philox(key=int(self.seed), counter=[int(i), int(j), int(k), 0])
        return self.sigma * float(np.random.Generator(bits).standard_normal())

    def draw(self, extents: tuple[int, int, int]) -> np.ndarray:
        """Noise tensor of the given (I, J, K) shape."""
        out = np.zeros(extents)
        if self.is_noiseless:
            return out
        for idx in np.ndindex(*extents):
            out[idx] = self.sample(*idx)
        return out


def render_pixel(e: Spectrum, r: Spectrum, c: Spectrum) -> float:
    if not (e.grid == r.grid == c.grid):
        raise GridMismatch(e.grid, r.grid if e.grid != r.grid else c.grid)
    return float(np.sum(e.values * r.values * c.values))


def _check_roles(E: SpectrumSet, R: SpectrumSet, C: SpectrumSet) -> None:
    got = (E.role, R.role, C.role)
    want = (Role.ILLUMINATION, Role.REFLECTANCE, Role.SENSITIVITY)
    if got != want:
        raise RoleConflict(
            "expected illumination, reflectance, sensitivity families; got "
            + ", ".join(r.value for r in got)
        )
    if not (E.grid == R.grid == C.grid):
        raise GridMismatch(E.grid, R.grid if E.grid != R.grid else C.grid)


def render_noiseless(E: SpectrumSet, R: SpectrumSet, C: SpectrumSet) -> np.ndarray:
    _check_roles(E, R, C)
    return np.einsum("in,jn,kn->ijk", E.matrix, R.matrix, C.matrix)


def render_observations(E: SpectrumSet, R: SpectrumSet, C: SpectrumSet,
                        noise: NoiseModel | None = None) -> Observations:
    clean = render_noiseless(E, R, C)
    if noise is None or noise.is_noiseless:
        return Observations(clean)
    return Observations(clean + noise.draw(clean.shape))
