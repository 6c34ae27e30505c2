"""
Rendering pixel values from spectra
===================================

A camera pixel is the sum over wavelength of illumination x reflectance x
channel sensitivity. Run from the repository root:

    python3 scripts/01_forward_model.py
"""

# %%
import numpy as np

from specbayes import DEFAULT_GRID, NoiseModel, render_observations
from specbayes.dataio import load_dataset

grid = DEFAULT_GRID  # 400..700 nm in 10 nm steps
E = load_dataset("d65", grid, normalize=True)
R = load_dataset("babelcolor", grid)
C = load_dataset("nikon5100", grid, normalize=True)
print(len(E), "illuminant,", len(R), "patches,", len(C), "channels on", grid.count, "samples")

# %%
# one pixel by hand, then the whole tensor
by_hand = np.sum(E[0].values * R[18].values * C[1].values)
obs = render_observations(E, R, C)
print("white patch, green channel:", by_hand, obs.values[0, 18, 1])

# %%
# noise is counter based: pixel (i, j, k) always gets the same draw for a seed
noisy = render_observations(E, R, C, NoiseModel.gaussian(0.01, seed=7))
again = render_observations(E, R, C, NoiseModel.gaussian(0.01, seed=7))
print("same seed, same pixels:", np.array_equal(noisy.values, again.values))
print("residual std:", (noisy.values - obs.values).std())
