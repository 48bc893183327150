"""
Widths and rates on Sobolev ellipsoids
======================================

Width profiles, the two critical indices, and how the detection radius
compares with the estimation risk as the noise level changes.
"""
# %%
import numpy as np

from qcod import make_sobolev, width_profile, rate_report, compare_rates

K = make_sobolev(1.0, 100)
prof = width_profile(K)
print("first widths:", np.round(prof.d[:8], 4))

# %%
# At sigma = 0.25 the testing index is 3 and the estimation index is 2.
rep = rate_report(K, 0.25)
print(rep.as_dict())

# %%
# Sweep sigma: the squared detection radius shrinks faster than the risk.
for sigma in np.geomspace(0.01, 0.9, 8):
    r = compare_rates(K, float(sigma))
    print(f"sigma={sigma:.4f}  j*={r['testing_index']:>3}  k*={r['estimation_index']:>3}  "
          f"radius^2/risk={r['radius_sq_over_risk']:.3f}")
