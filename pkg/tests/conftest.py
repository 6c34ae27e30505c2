import numpy as np
import pytest

from specbayes import (
    DEFAULT_GRID,
    EstimationProblem,
    GaussianBelief,
    Observations,
    Role,
    Spectrum,
    SpectrumSet,
    WavelengthGrid,
)
from specbayes.benchmark import load_scene
from specbayes.dataio import load_prior_library


def make_set(values, role, grid=None, bounded=True):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    grid = grid or WavelengthGrid(400.0, 10.0, values.shape[1])
    return SpectrumSet([Spectrum(grid, v, role, label=f"{role.value}{n}", bounded=bounded)
                        for n, v in enumerate(values)])


def random_spd(rng, n, floor=0.5):
    A = rng.normal(size=(n, n)) / np.sqrt(n)
    return A @ A.T + floor * np.eye(n)


def random_problem(rng, role, n, extents=(2, 3, 3), beta=None, index=None):
    """Random instance with non-negative known spectra and noisy observations."""
    grid = WavelengthGrid(400.0, 10.0, n)
    families = {}
    for r in Role:
        size = extents[r.axis]
        values = rng.uniform(0.0, 1.0, size=(size, n))
        families[r] = make_set(values, r, grid)
    obs = np.einsum("in,jn,kn->ijk", families[Role.ILLUMINATION].matrix,
                    families[Role.REFLECTANCE].matrix, families[Role.SENSITIVITY].matrix)
    obs = obs + rng.normal(0, 0.05, size=obs.shape)
    known = [r for r in Role if r is not role]
    if rng.uniform() < 0.5:
        known.reverse()
    beta = beta if beta is not None else float(rng.uniform(0.5, 5.0))
    index = index if index is not None else int(rng.integers(extents[role.axis]))
    return EstimationProblem(role, index, families[known[0]], families[known[1]],
                             Observations(obs), beta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def scene():
    return load_scene(DEFAULT_GRID)


@pytest.fixture(scope="session")
def library():
    return load_prior_library(DEFAULT_GRID)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
