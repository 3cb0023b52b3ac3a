# %% [markdown]
# # LoG stencils for the two branches
#
# The fine branch uses a small spread (0.5) and the coarse branch a large one (20),
# both on a 5x5 window.  Raw samples of the LoG do not sum to zero once the window
# truncates them; at spread 20 the 5x5 patch is nearly flat, so the mean is
# subtracted to turn it back into a band-pass stencil.

# %%
import numpy as np

from rsfeat import PipelineConfig, default_kernels, make_log_kernel

np.set_printoptions(precision=4, suppress=False, linewidth=110)

for sigma in (0.5, 1.0, 20.0):
    raw = make_log_kernel(sigma, 5, dc_correct=False)
    fixed = make_log_kernel(sigma, 5, dc_correct=True)
    print(f"sigma={sigma}: raw sum={raw.coeffs.sum():+.3e}, corrected sum={fixed.coeffs.sum():+.1e}")

# %% [markdown]
# Raw coefficients at sigma = 1: the centre is -1/pi and the ring at radius^2 = 2 is exactly zero.

# %%
print(make_log_kernel(1.0, 5, dc_correct=False).format_grid(6))

# %% [markdown]
# The defaults used by the pipelines, and the alternative "variance" reading where the
# configured values are square-rooted first.

# %%
low, high = default_kernels(PipelineConfig())
print("fine branch\n", low.coeffs, "\ncoarse branch\n", high.coeffs)
low_v, high_v = default_kernels(PipelineConfig(interpret_as_variance=True))
print("as variance -> sigmas", round(low_v.sigma, 4), round(high_v.sigma, 4))
