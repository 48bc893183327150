"""
Projection test: calibration and a single decision
==================================================
"""
# %%
import numpy as np

from qcod import make_sobolev, width_profile, testing_index
from qcod.detection import optimal_projection, mc_calibrate, theoretical_test, run_test, split_sample

sigma = 0.25
K = make_sobolev(1.0, 100)
k = testing_index(width_profile(K), sigma)
proj = optimal_projection(K, k)
s2 = 2 * sigma**2  # per-sample variance after splitting

# %%
mc = mc_calibrate(proj, s2, 0.05, reps=100_000, seed=0)
cheb = theoretical_test(proj, s2, 0.05)
print(f"k={k}  Monte Carlo threshold={mc.threshold:.4f}  Chebyshev threshold={cheb.threshold:.4f}")

# %%
# One noisy observation with a signal on the last coordinate.
rng = np.random.default_rng(1)
theta = np.zeros(100)
theta[-1] = 0.6
x = theta + sigma * rng.standard_normal(100)
xa, xb = split_sample(x, sigma, rng)
print(run_test(mc, xa, xb))
