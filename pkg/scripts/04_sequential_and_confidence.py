"""
Updating as data arrive, and how sure we are
============================================

The posterior after one batch of patches is a valid prior for the next one,
so the data can be folded in a few patches at a time. The posterior
precision also gives a per-wavelength uncertainty: where the camera sees
little light, the estimate leans on the prior.
"""

# %%
import numpy as np

from specbayes import NoiseModel, Observations, Role, SpectrumSet, confidence
from specbayes import EstimationProblem, bayes_estimate, bayes_posterior, sequential_update
from specbayes.benchmark import BENCHMARK_GAMMA, load_scene
from specbayes.dataio import load_prior_library
from specbayes.priors import PrecisionSpec, daylight_prior

scene = load_scene()
prior = daylight_prior(load_prior_library(scene.grid), PrecisionSpec(1.0, BENCHMARK_GAMMA))
sigma = 0.01
obs = scene.render(NoiseModel.gaussian(sigma, 4)).values

# %%
batches = [range(0, 6), range(6, 12), range(12, 18), range(18, 24)]
problems = [EstimationProblem(Role.ILLUMINATION, 0, SpectrumSet([scene.reflectance[j] for j in b]),
                              scene.sensitivity, Observations(obs[:, list(b), :]), 1 / sigma**2)
            for b in batches]
seq = sequential_update(prior, problems)
full = bayes_posterior(scene.problem(Role.ILLUMINATION, 0, Observations(obs), 1 / sigma**2), prior)
print("sequential vs batch, max mean difference:", np.abs(seq.mean - full.mean).max())

# %%
est = bayes_estimate(scene.problem(Role.ILLUMINATION, 0, Observations(obs), 1 / sigma**2), prior)
# confidence() is the posterior precision matrix; its inverse diagonal gives
# a marginal standard deviation per wavelength (unnormalized units)
sd = np.sqrt(np.diag(np.linalg.inv(confidence(est))))
for w, m, s in list(zip(scene.grid.wavelengths, est.posterior.mean, sd))[::5]:
    print(f"{w:.0f} nm  mean {m:.3f}  sd {s:.3g}")
