"""
Recovering camera sensitivities
===============================

Each channel is estimated separately from a known illuminant and the 24
patches. The prior mean for a channel is the average of that channel over a
database of other cameras (the target camera is left out). The baseline
restricts the curve to mean + 2 principal components of the same database.
"""

# %%
import numpy as np

from specbayes import NoiseModel, Role, bayes_estimate, least_squares_estimate, rmse
from specbayes.benchmark import BENCHMARK_GAMMA, load_scene
from specbayes.dataio import load_prior_library
from specbayes.jiang import jiang_estimate
from specbayes.priors import PrecisionSpec, sensitivity_prior

scene = load_scene()
library = load_prior_library(scene.grid)  # Nikon 5100 is held out by default
print("prior built from", len(library.camera_names), "cameras")

# %%
sigma = 0.01
obs = scene.render(NoiseModel.gaussian(sigma, 0))
spec = PrecisionSpec(1.0, BENCHMARK_GAMMA)
for c, name in enumerate("RGB"):
    p = scene.problem(Role.SENSITIVITY, c, obs, 1 / sigma**2)
    truth = scene.sensitivity[c]
    basis = library.sensitivity_bases[c]
    scores = {
        "lsq": rmse(least_squares_estimate(p).normalized, truth),
        "basis": rmse(jiang_estimate(p, library.sensitivity_means[c], basis.components).normalized, truth),
        "bayes": rmse(bayes_estimate(p, sensitivity_prior(library, c, spec)).normalized, truth),
    }
    print(name, "  ".join(f"{k}={v:.3f}" for k, v in scores.items()))

# %%
# the basis fit barely moves with noise: two coefficients are easy to pin down,
# but the shape is limited to what the basis can express
c = 1
basis = library.sensitivity_bases[c]
for s in (0.0, 0.01, 0.05):
    p = scene.problem(Role.SENSITIVITY, c, scene.render(NoiseModel.gaussian(s, 0)))
    est = jiang_estimate(p, library.sensitivity_means[c], basis.components)
    print(f"sigma={s}: basis rmse {rmse(est.normalized, scene.sensitivity[c]):.4f}")
print("explained by 2 components:", np.round(basis.singular_values**2 / np.sum(basis.singular_values**2), 3))
