"""
Recovering the illuminant
=========================

With the patches and the camera known, the illuminant is a linear inverse
problem: 72 pixel equations for 31 unknowns. Least squares nails it without
noise and falls apart with a little noise. A Gaussian prior centred on mean
daylight, with a smoothness penalty, keeps it stable.
"""

# %%
from pathlib import Path

from specbayes import NoiseModel, Role, bayes_estimate, least_squares_estimate, rmse
from specbayes.benchmark import BENCHMARK_GAMMA, load_scene
from specbayes.dataio import load_prior_library
from specbayes.plotting import svg_line_chart
from specbayes.priors import PrecisionSpec, daylight_prior

scene = load_scene()
truth = scene.illumination[0]
library = load_prior_library(scene.grid)

# %%
clean = scene.problem(Role.ILLUMINATION, 0, scene.render())
print("noiseless least squares rmse:", rmse(least_squares_estimate(clean).normalized, truth))

# %%
sigma = 0.01
noisy = scene.problem(Role.ILLUMINATION, 0, scene.render(NoiseModel.gaussian(sigma, 0)), 1 / sigma**2)
lsq = least_squares_estimate(noisy)
print("noisy least squares rmse:", rmse(lsq.normalized, truth))

# %%
# alpha pulls towards the daylight mean, gamma penalizes curvature
for gamma in (0.0, 10.0, BENCHMARK_GAMMA):
    prior = daylight_prior(library, PrecisionSpec(1.0, gamma))
    print(f"bayes rmse, gamma={gamma:g}:", rmse(bayes_estimate(noisy, prior).normalized, truth))

# %%
bayes = bayes_estimate(noisy, daylight_prior(library, PrecisionSpec(1.0, BENCHMARK_GAMMA)))
out = Path("illumination.svg")
out.write_text(svg_line_chart([truth, lsq.normalized, bayes.normalized],
                              ["D65", "least squares", "bayes"], title="Illuminant, noise std 0.01"))
print("wrote", out)
