"""Bayesian estimation of illumination, reflectance and camera sensitivity spectra."""

from .core import (
    DEFAULT_GRID,
    DesignMatrix,
    GaussianBelief,
    Observations,
    Role,
    Spectrum,
    SpectrumSet,
    WavelengthGrid,
    build_design_matrix,
    elementwise_product,
)
from .errors import SpectralError
from .estimators import (
    Estimate,
    EstimationProblem,
    Method,
    bayes_estimate,
    bayes_posterior,
    confidence,
    least_squares_estimate,
    normalize,
    rmse,
    sequential_update,
)
from .forward import NoiseKind, NoiseModel, render_observations, render_pixel
from .jiang import jiang_estimate
from .priors import (
    PrecisionSpec,
    PriorLibrary,
    daylight_prior,
    fit_pca_basis,
    flat_prior,
    sensitivity_prior,
)

__version__ = "0.1.0"
