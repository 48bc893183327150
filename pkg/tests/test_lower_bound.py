import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcod import _streams
from qcod.detection import mc_calibrate, optimal_projection, run_test, split_sample
from qcod.lower_bound import (
    ExtremalPrior,
    chi_square_chain,
    chi_square_divergence,
    extremal_vector,
    greedy_fill,
    extremal_precondition,
    risk_lower_bound,
    sample_prior,
)
from qcod.qco_sets import Ellipsoid, Hyperrectangle, contains, make_sobolev
from qcod.widths import testing_index, width_profile

from oracles import lp_vertex_optimum


def test_box_example():
    B = Hyperrectangle(np.ones(16))
    prior = extremal_vector(B, 4, 1.0)
    assert extremal_precondition(B, 4, 1.0)
    assert width_profile(B)[3] == pytest.approx(math.sqrt(13))
    assert np.count_nonzero(prior.theta) == 4
    np.testing.assert_allclose(prior.t[prior.t > 0], 0.5)
    assert prior.norm_sq == pytest.approx(2.0)
    assert prior.sup_norm == pytest.approx(math.sqrt(0.5))
    assert prior.sup_norm <= 4**-0.25


def test_unit_ball_example():
    E = Ellipsoid(np.ones(10))
    prior = extremal_vector(E, 4, 0.5)
    np.testing.assert_allclose(prior.t[prior.t > 0], 0.125)
    assert np.count_nonzero(prior.theta) == 4
    assert prior.norm_sq == pytest.approx(0.5)
    assert np.sum(prior.t / E.a) == pytest.approx(0.5)


def test_infeasible_example():
    E = Ellipsoid([0.25, 1.0])
    assert not extremal_precondition(E, 2, 5.0)
    assert extremal_vector(E, 2, 5.0) is None


def test_k_out_of_range():
    with pytest.raises(ValueError):
        extremal_vector(Ellipsoid([1.0, 2.0]), 0, 1.0)
    with pytest.raises(ValueError):
        extremal_vector(Ellipsoid([1.0, 2.0]), 3, 1.0)


def _grid_cases():
    for alpha in (0.5, 1.0, 2.0):
        for n in (20, 100):
            yield make_sobolev(alpha, n)
    for n in (16, 64):
        yield Hyperrectangle(np.ones(n))


@pytest.mark.parametrize("K", list(_grid_cases()), ids=repr)
def test_extremal_invariants_on_grid(K):
    checked = 0
    for sigma in np.geomspace(0.02, 0.9 * width_profile(K)[0], 15):
        j = testing_index(width_profile(K), sigma)
        if j is None:
            continue
        for k in range(1, j + 1):
            assert extremal_precondition(K, k, sigma)
            prior = extremal_vector(K, k, sigma)
            assert prior.norm_sq == pytest.approx(math.sqrt(k) * sigma**2, rel=1e-9)
            assert prior.sup_norm <= sigma / k**0.25 + 1e-12
            assert contains(K, prior.theta, 1e-9)
            checked += 1
    assert checked > 0


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 8).flatmap(lambda n: st.lists(st.floats(0.01, 5.0), min_size=n, max_size=n)),
    st.floats(0.01, 3.0),
    st.booleans(),
)
def test_greedy_matches_vertex_enumeration(vals, cap, ellipsoid):
    if ellipsoid:
        K = Ellipsoid(vals)
        best = lp_vertex_optimum([1.0 / a for a in K.a], cap)
    else:
        K = Hyperrectangle(vals)
        best = lp_vertex_optimum([0.0] * K.n, cap, box=[c**2 for c in K.c])
    assert greedy_fill(K, cap).sum() == pytest.approx(best, rel=1e-12, abs=1e-12)


def test_chi_square_examples():
    theta = np.zeros(10)
    theta[:4] = math.sqrt(0.5)
    assert chi_square_divergence(ExtremalPrior(theta, 0.0, 4, 1.0)) == 0.0
    val = chi_square_divergence(ExtremalPrior(theta, 1.0, 4, 1.0))
    assert val == pytest.approx(math.cosh(0.5) ** 4 - 1, rel=1e-12)
    assert val == pytest.approx(0.6169, abs=1e-4)


def test_chi_square_large_n_stays_finite():
    theta = np.full(100_000, 3.0)
    val = chi_square_divergence(ExtremalPrior(theta, 1.0, 4, 1.0))
    assert math.isinf(val) or val > 1e300  # overflow only at the very end
    small = np.full(100_000, 1e-3)
    assert math.isfinite(chi_square_divergence(ExtremalPrior(small, 1.0, 4, 1.0)))


@pytest.mark.parametrize("kappa", [0.25, 0.5, 0.9])
def test_cosh_chain(kappa):
    for K in _grid_cases():
        for sigma in (0.05, 0.1, 0.25):
            j = testing_index(width_profile(K), sigma)
            if j is None:
                continue
            for k in range(1, j + 1):
                prior = extremal_vector(K, k, sigma, kappa)
                chi2, quartic, mixed, final = chi_square_chain(prior)
                tol = 1e-12
                assert chi2 <= quartic * (1 + tol) + tol
                assert quartic <= mixed * (1 + tol) + tol
                assert mixed <= final * (1 + tol) + tol


def test_risk_lower_bound_examples():
    expected = 1 - 0.05 - 0.5 * math.sqrt(math.exp(0.5**4 / 2) - 1)
    assert risk_lower_bound(0.05, 0.5) == pytest.approx(expected)
    assert risk_lower_bound(0.05, 0.5) == pytest.approx(0.861, abs=1e-3)
    assert risk_lower_bound(0.05, 1e-6) == pytest.approx(0.95)
    assert risk_lower_bound(0.05, 2.0) < 0


def test_sample_prior_properties():
    K = make_sobolev(1, 100)
    sigma, kappa = 0.25, 0.5
    prior = extremal_vector(K, 3, sigma, kappa)
    draws = sample_prior(prior, _streams.derive(0, 7), size=10_000)
    norms = np.sum(draws**2, axis=1)
    np.testing.assert_allclose(norms, kappa**2 * math.sqrt(3) * sigma**2, rtol=1e-12)
    assert all(contains(K, d) for d in draws)
    assert set(np.unique(np.sign(draws[:, prior.theta > 0]))) == {-1.0, 1.0}
    zero = ExtremalPrior(np.zeros(5), 0.5, 1, 1.0)
    np.testing.assert_array_equal(sample_prior(zero, _streams.derive(0)), np.zeros(5))


def test_power_respects_information_floor():
    """Under the Rademacher prior no level-0.05 test can have type II error below the bound."""
    K = make_sobolev(1, 100)
    sigma, kappa, level = 0.25, 0.5, 0.05
    k = testing_index(width_profile(K), sigma)
    prior = extremal_vector(K, k, sigma, kappa)
    test = mc_calibrate(optimal_projection(K, k), 2 * sigma**2, level, reps=100_000, seed=1)
    reps = 5000
    rng = _streams.derive(1, 55)
    mus = sample_prior(prior, rng, size=reps)
    misses = 0
    for mu in mus:
        x = mu + rng.normal(0.0, sigma, K.n)
        a, b = split_sample(x, sigma, rng)
        misses += not run_test(test, a, b).reject
    type2 = misses / reps
    se = math.sqrt(type2 * (1 - type2) / reps)
    assert type2 >= risk_lower_bound(level, kappa) - 3 * se
