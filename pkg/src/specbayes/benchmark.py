"""Simulation harness for the RMSE tables.

The reference scene is one CIE D65 illuminant, the 24 BabelColor patches and
the three Nikon 5100 channels. Every spectrum is max-normalized on the
working grid before rendering. Pixel values are rendered, optionally
perturbed with Gaussian noise, and each method then estimates either the
illuminant or one camera channel from the other two families.

Noisy cells are averaged over seeds ``base_seed .. base_seed + seeds - 1``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_GRID, Observations, Role, SpectrumSet, WavelengthGrid
from .dataio import load_dataset, load_prior_library
from .errors import SpectralError
from .estimators import (
    DEFAULT_BETA,
    EstimationProblem,
    Method,
    bayes_estimate,
    least_squares_estimate,
    rmse,
)
from .forward import NoiseModel, render_observations
from .jiang import jiang_estimate
from .priors import PrecisionSpec, PriorLibrary, daylight_prior, sensitivity_prior

# Smoothness weight used by the benchmark. The plain isotropic prior
# (gamma=0) lets sigma=0.01 noise through the weakly observed directions.
BENCHMARK_GAMMA = 1000.0

ROWS = (
    ("Illumination", Role.ILLUMINATION, 0),
    ("Sensitivity R", Role.SENSITIVITY, 0),
    ("Sensitivity G", Role.SENSITIVITY, 1),
    ("Sensitivity B", Role.SENSITIVITY, 2),
)
METHODS = (Method.LEAST_SQUARES, Method.JIANG_BASIS, Method.BAYES)
METHOD_TITLES = {
    Method.LEAST_SQUARES: "Least squares",
    Method.JIANG_BASIS: "Jiang",
    Method.BAYES: "Proposed",
}


@dataclass(frozen=True)
class Scene:
    illumination: SpectrumSet
    reflectance: SpectrumSet
    sensitivity: SpectrumSet

    @property
    def grid(self) -> WavelengthGrid:
        return self.illumination.grid

    def family(self, role: Role) -> SpectrumSet:
        return {Role.ILLUMINATION: self.illumination, Role.REFLECTANCE: self.reflectance,
                Role.SENSITIVITY: self.sensitivity}[role]

    def render(self, noise: NoiseModel | None = None) -> Observations:
        return render_observations(self.illumination, self.reflectance, self.sensitivity, noise)

    def problem(self, role: Role, index: int, observations: Observations,
                beta: float = DEFAULT_BETA) -> EstimationProblem:
        known = [r for r in Role if r is not role]
        return EstimationProblem(role, index, self.family(known[0]), self.family(known[1]),
                                 observations, beta)


def load_scene(grid: WavelengthGrid = DEFAULT_GRID, illumination="d65",
               reflectance="babelcolor", sensitivity="nikon5100", normalize: bool = True) -> Scene:
    return Scene(
        load_dataset(illumination, grid, normalize=normalize),
        load_dataset(reflectance, grid),
        load_dataset(sensitivity, grid, normalize=normalize),
    )


@dataclass(frozen=True)
class BenchmarkConfig:
    grid: WavelengthGrid = DEFAULT_GRID
    seeds: int = 20
    base_seed: int = 0
    sigmas: tuple[float, ...] = (0.0, 0.01)
    alpha: float = 1.0
    gamma: float = BENCHMARK_GAMMA
    beta: float | None = None
    num_components: int = 2
    held_out: tuple[str, ...] = ("Nikon 5100",)
    normalize_rmse: bool = True

    def __post_init__(self):
        if self.seeds < 1:
            raise SpectralError("need at least one seed")
        if any(not np.isfinite(s) or s < 0 for s in self.sigmas):
            raise SpectralError("noise sigmas must be finite and non-negative")

    def beta_for(self, sigma: float) -> float:
        if self.beta is not None:
            return self.beta
        return 1.0 / sigma**2 if sigma > 0 else DEFAULT_BETA

    @property
    def precision(self) -> PrecisionSpec:
        return PrecisionSpec(self.alpha, self.gamma)


@dataclass
class Cell:
    label: str
    method: Method
    sigma: float
    values: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.values)) if len(self.values) > 1 else 0.0

    @property
    def applicable(self) -> bool:
        return bool(self.values)


def estimate_cell(scene: Scene, library: PriorLibrary, config: BenchmarkConfig, method: Method,
                  role: Role, index: int, observations: Observations, beta: float):
    problem = scene.problem(role, index, observations, beta)
    if method is Method.LEAST_SQUARES:
        return least_squares_estimate(problem)
    if method is Method.BAYES:
        if role is Role.ILLUMINATION:
            prior = daylight_prior(library, config.precision)
        elif role is Role.SENSITIVITY:
            prior = sensitivity_prior(library, index, config.precision)
        else:
            raise SpectralError("the benchmark has no prior for reflectance")
        return bayes_estimate(problem, prior)
    basis = library.sensitivity_bases[index]
    return jiang_estimate(problem, library.sensitivity_means[index], basis.components)


def run_benchmark(config: BenchmarkConfig = BenchmarkConfig(), scene: Scene | None = None,
                  library: PriorLibrary | None = None) -> dict[float, list[list[Cell]]]:
    """RMSE table per noise level: ``tables[sigma][row][column]``."""
    scene = scene or load_scene(config.grid)
    library = library or load_prior_library(config.grid, config.held_out, config.num_components)
    tables = {}
    for sigma in config.sigmas:
        runs = [NoiseModel.gaussian(sigma, config.base_seed + s)
                for s in range(config.seeds if sigma > 0 else 1)]
        table = [[Cell(label, m, sigma) for m in METHODS] for label, _, _ in ROWS]
        for noise in runs:
            obs = scene.render(noise)
            for r, (_, role, index) in enumerate(ROWS):
                truth = scene.family(role)[index]
                for c, method in enumerate(METHODS):
                    if method is Method.JIANG_BASIS and role is not Role.SENSITIVITY:
                        continue
                    est = estimate_cell(scene, library, config, method, role, index, obs,
                                        config.beta_for(sigma))
                    table[r][c].values.append(rmse(est.normalized, truth, config.normalize_rmse))
        tables[sigma] = table
    return tables


def tables_to_csv(tables) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sigma", "row", "method", "rmse_mean", "rmse_std", "runs"])
    for sigma, table in tables.items():
        for row in table:
            for cell in row:
                if cell.applicable:
                    w.writerow([repr(float(sigma)), cell.label, cell.method.value,
                                f"{cell.mean:.6f}", f"{cell.std:.6f}", len(cell.values)])
                else:
                    w.writerow([repr(float(sigma)), cell.label, cell.method.value, "", "", 0])
    return buf.getvalue()


def format_tables(tables) -> str:
    out = []
    for sigma, table in tables.items():
        runs = max(len(c.values) for row in table for c in row)
        title = "RMSE (noiseless)" if sigma == 0 else f"RMSE (Gaussian noise std {sigma:g}, {runs} seeds)"
        out.append(title)
        header = f"{'':<15}" + "".join(f"{METHOD_TITLES[m]:>20}" for m in METHODS)
        out.append(header)
        out.append("-" * len(header))
        for row in table:
            cells = []
            for cell in row:
                if not cell.applicable:
                    text = "---"
                elif len(cell.values) > 1:
                    text = f"{cell.mean:.3f} +/- {cell.std:.3f}"
                else:
                    text = f"{cell.mean:.3f}"
                cells.append(f"{text:>20}")
            out.append(f"{row[0].label:<15}" + "".join(cells))
        out.append("")
    return "\n".join(out)
