"""Prior beliefs built from reference data.

The prior mean comes from a reference spectrum (mean daylight, or the
per-channel mean of a camera database). The prior precision is

    alpha * I + gamma * D2^T D2

where ``D2`` is the second-difference operator, so ``gamma`` penalizes
curvature and ``alpha`` the distance from the mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import GaussianBelief, Role, Spectrum, SpectrumSet, WavelengthGrid
from .errors import DegenerateDesign, GridMismatch, SpectralError

ORTHONORMAL_TOL = 1e-8


@dataclass(frozen=True)
class PrecisionSpec:
    alpha: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise SpectralError(f"alpha must be positive, got {self.alpha}")
        if not self.gamma >= 0:
            raise SpectralError(f"gamma must be non-negative, got {self.gamma}")


def second_difference(n: int) -> np.ndarray:
    """(n-2) x n matrix whose rows are the stencil [1, -2, 1]."""
    return np.diff(np.eye(n), 2, axis=0)


def structured_precision(n: int, spec: PrecisionSpec = PrecisionSpec()) -> np.ndarray:
    precision = spec.alpha * np.eye(n)
    if spec.gamma > 0 and n >= 3:
        D = second_difference(n)
        precision = precision + spec.gamma * (D.T @ D)
    return precision


@dataclass(frozen=True, eq=False)
class PCABasis:
    """Mean-centred principal directions of a set of spectra.

    ``components`` is N x B with orthonormal columns ordered by decreasing
    singular value; ``scores`` holds each input's coordinates, one row per
    input spectrum.
    """

    mean: np.ndarray
    components: np.ndarray
    singular_values: np.ndarray
    scores: np.ndarray

    @property
    def num_components(self) -> int:
        return self.components.shape[1]

    def reconstruct(self, scores=None) -> np.ndarray:
        scores = self.scores if scores is None else np.asarray(scores)
        return self.mean + scores @ self.components.T


def fit_pca_basis(spectra: Sequence[Spectrum], num_components: int) -> PCABasis:
    spectra = list(spectra)
    if num_components < 1:
        raise SpectralError("need at least one principal component")
    if len(spectra) < num_components + 1:
        raise SpectralError(
            f"{num_components} components need at least {num_components + 1} spectra, got {len(spectra)}"
        )
    grid = spectra[0].grid
    if num_components >= grid.count:
        raise SpectralError(f"{num_components} components must be fewer than N={grid.count}")
    for s in spectra:
        if s.grid != grid:
            raise GridMismatch(grid, s.grid)

    X = np.stack([s.values for s in spectra])
    mean = X.mean(axis=0)
    _, sv, vt = np.linalg.svd(X - mean, full_matrices=False)
    sv = sv[:num_components]
    if sv[-1] <= 1e-12 * max(sv[0], np.abs(X).max(), 1e-300):
        raise DegenerateDesign(
            f"spectra span fewer than {num_components} directions (singular values {sv})"
        )
    components = vt[:num_components].T
    # sign convention: largest-magnitude entry of each direction is positive
    flip = np.sign(components[np.argmax(np.abs(components), axis=0), np.arange(num_components)])
    components = components * flip
    scores = (X - mean) @ components
    return PCABasis(mean, components, sv, scores)


@dataclass(frozen=True, eq=False)
class PriorLibrary:
    """Reference statistics for building priors.

    ``sensitivity_bases`` holds one :class:`PCABasis` per camera channel when
    a camera database was supplied with enough members.
    """

    daylight_mean: Spectrum
    sensitivity_means: tuple[Spectrum, ...]
    sensitivity_bases: tuple[PCABasis, ...] = field(default=())
    camera_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        grid = self.daylight_mean.grid
        for s in self.sensitivity_means:
            if s.grid != grid:
                raise GridMismatch(grid, s.grid)
        for b in self.sensitivity_bases:
            if b.components.shape[0] != grid.count:
                raise SpectralError("basis length does not match the library grid")
            gram = b.components.T @ b.components
            if np.abs(gram - np.eye(gram.shape[0])).max() > ORTHONORMAL_TOL:
                raise SpectralError("basis columns are not orthonormal")

    @property
    def grid(self) -> WavelengthGrid:
        return self.daylight_mean.grid


def build_prior_library(daylight_mean: Spectrum, cameras: Sequence[SpectrumSet],
                        num_components: int = 2, names: Sequence[str] = ()) -> PriorLibrary:
    """Per-channel means (and PCA bases) of a camera database.

    Each camera channel is max-normalized before averaging so cameras with
    different gains weigh equally.
    """
    cameras = list(cameras)
    if not cameras:
        raise SpectralError("camera database is empty")
    grid = daylight_mean.grid
    channels = len(cameras[0])
    for cam in cameras:
        if cam.grid != grid:
            raise GridMismatch(grid, cam.grid)
        if len(cam) != channels:
            raise SpectralError("cameras in the database have differing channel counts")
    per_channel = [[cam[k].max_normalized() for cam in cameras] for k in range(channels)]
    labels = cameras[0].labels
    means = tuple(
        Spectrum(grid, np.mean([s.values for s in members], axis=0), Role.SENSITIVITY,
                 label=f"mean {labels[k] or k}")
        for k, members in enumerate(per_channel)
    )
    bases = ()
    if num_components and len(cameras) > num_components:
        bases = tuple(fit_pca_basis(members, num_components) for members in per_channel)
    return PriorLibrary(daylight_mean, means, bases, tuple(names))


def _resampled(s: Spectrum, grid: WavelengthGrid | None) -> Spectrum:
    if grid is None or grid == s.grid:
        return s
    from .dataio import resample_to_grid

    return resample_to_grid(s, grid)


def daylight_prior(lib: PriorLibrary, spec: PrecisionSpec = PrecisionSpec(),
                   grid: WavelengthGrid | None = None) -> GaussianBelief:
    mean = _resampled(lib.daylight_mean, grid)
    return GaussianBelief(mean.values, structured_precision(mean.grid.count, spec))


def sensitivity_prior(lib: PriorLibrary, channel: int, spec: PrecisionSpec = PrecisionSpec(),
                      grid: WavelengthGrid | None = None) -> GaussianBelief:
    if not 0 <= channel < len(lib.sensitivity_means):
        raise SpectralError(
            f"channel {channel} out of range for {len(lib.sensitivity_means)} sensitivity means"
        )
    mean = _resampled(lib.sensitivity_means[channel], grid)
    return GaussianBelief(mean.values, structured_precision(mean.grid.count, spec))


def flat_prior(grid: WavelengthGrid, spec: PrecisionSpec = PrecisionSpec()) -> GaussianBelief:
    """Zero-mean prior; with small ``alpha`` it approaches least squares."""
    return GaussianBelief(np.zeros(grid.count), structured_precision(grid.count, spec))
