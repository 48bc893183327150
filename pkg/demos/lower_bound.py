"""
Extremal vectors and the two-point lower bound
==============================================
"""
# %%
from qcod import make_sobolev, width_profile, testing_index
from qcod.lower_bound import extremal_vector, chi_square_chain, risk_lower_bound

sigma = 0.25
K = make_sobolev(1.0, 100)
k = testing_index(width_profile(K), sigma)

prior = extremal_vector(K, k, sigma, kappa=0.5)
print("support size:", int((prior.theta > 0).sum()), " |theta|^2 =", round(prior.norm_sq, 6))

# %%
chi2, quartic, mixed, final = chi_square_chain(prior)
print(f"chi2={chi2:.3e} <= {quartic:.3e} <= {mixed:.3e} <= {final:.3e}")

# %%
for kappa in (0.25, 0.5, 0.9, 1.5):
    print(kappa, round(risk_lower_bound(0.05, kappa), 4))
