"""Extremal vectors and the Rademacher-prior lower bound.

If ``d_{k-1}(K) > k**0.25 * sigma`` there is a ``theta`` in ``K`` with
``|theta|^2 = sqrt(k) sigma^2`` and ``|theta|_inf <= sigma / k**0.25``.
Writing ``t = theta**2`` this is a fractional knapsack over ``K^2``:
maximise ``sum(t)`` with ``0 <= t_i <= sigma^2/sqrt(k)`` and ``t`` in ``K^2``.
For ellipsoids ``K^2`` is a simplex-like region ``sum(t_i / a_i) <= 1`` and the
greedy fill by decreasing ``a_i`` is optimal; for hyperrectangles ``K^2`` is a
box and every coordinate is filled independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qco_sets import ConstraintSet, Ellipsoid, contains
from .widths import width_profile


@dataclass(frozen=True)
class ExtremalPrior:
    theta: np.ndarray
    kappa: float
    k: int
    sigma: float

    @property
    def t(self) -> np.ndarray:
        return self.theta**2

    @property
    def norm_sq(self) -> float:
        return float(np.sum(self.theta**2))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.theta)))


def fill_order(K: ConstraintSet) -> np.ndarray:
    """Coordinates in the order the greedy fill visits them."""
    if isinstance(K, Ellipsoid):
        return np.arange(K.n)[::-1]  # a is stored ascending
    return np.lexsort((np.arange(K.n), -K.c))


def greedy_fill(K: ConstraintSet, cap: float) -> np.ndarray:
    """Maximiser of ``sum(t)`` over ``t in K^2, 0 <= t <= cap`` (untruncated)."""
    t = np.zeros(K.n)
    if isinstance(K, Ellipsoid):
        budget = 1.0
        for i in fill_order(K):
            if budget <= 0:
                break
            take = min(cap, budget * K.a[i])
            t[i] = take
            budget -= take / K.a[i]
        return t
    return np.minimum(K.c**2, cap)


def extremal_precondition(K: ConstraintSet, k: int, sigma: float) -> bool:
    """Whether ``d_{k-1}(K) > k**0.25 * sigma`` for the coordinate widths."""
    return bool(width_profile(K)[k - 1] > k**0.25 * sigma)


def extremal_vector(
    K: ConstraintSet, k: int, sigma: float, kappa: float = 0.5
) -> Optional[ExtremalPrior]:
    """Nonnegative ``theta`` in ``K`` with ``|theta|^2 = sqrt(k) sigma^2`` and small sup-norm.

    Returns ``None`` when the greedy optimum falls short of ``sqrt(k) sigma^2``.
    ``theta`` is given in the set's stored coordinates.
    """
    n = K.n
    if int(k) != k or not 1 <= k <= n:
        raise ValueError(f"k must be an integer in [1, {n}], got {k}")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0 <= kappa <= 1:
        raise ValueError("kappa must lie in [0, 1]")
    k = int(k)
    cap = sigma**2 / math.sqrt(k)
    target = math.sqrt(k) * sigma**2
    t = greedy_fill(K, cap)
    # k * cap equals target only up to rounding
    if t.sum() < target * (1 - 1e-12):
        if extremal_precondition(K, k, sigma):
            raise AssertionError(
                f"greedy fill {t.sum():.6g} < {target:.6g} although d_(k-1) > k^(1/4) sigma"
            )
        return None

    # keep the fill in visiting order up to exactly `target`
    order = fill_order(K)
    before = np.concatenate([[0.0], np.cumsum(t[order])[:-1]])
    kept = np.clip(target - before, 0.0, t[order])
    t_trunc = np.zeros(n)
    t_trunc[order] = kept
    theta = np.sqrt(t_trunc)
    theta.setflags(write=False)
    return ExtremalPrior(theta, float(kappa), k, float(sigma))


def _log_cosh(x: np.ndarray) -> np.ndarray:
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def chi_square_divergence(prior: ExtremalPrior) -> float:
    """``prod_i cosh(kappa^2 theta_i^2 / sigma^2) - 1``, evaluated in log space."""
    x = prior.kappa**2 * prior.theta**2 / prior.sigma**2
    with np.errstate(over="ignore"):
        return float(np.expm1(np.sum(_log_cosh(x))))


def chi_square_chain(prior: ExtremalPrior) -> tuple[float, float, float, float]:
    """The divergence and the three successive upper bounds that control it.

    ``chi2 <= exp(kappa^4 sum theta^4 / 2 sigma^4) - 1
           <= exp(kappa^4 |theta|_inf^2 |theta|^2 / 2 sigma^4) - 1
           <= exp(kappa^4 / 2) - 1``; the last step needs the extremal properties.
    """
    s4 = prior.sigma**4
    k4 = prior.kappa**4
    quartic = float(np.expm1(k4 * np.sum(prior.theta**4) / (2 * s4)))
    mixed = float(np.expm1(k4 * prior.sup_norm**2 * prior.norm_sq / (2 * s4)))
    final = math.expm1(k4 / 2)
    return chi_square_divergence(prior), quartic, mixed, final


def risk_lower_bound(level: float, kappa: float) -> float:
    """``1 - level - sqrt(exp(kappa^4/2) - 1) / 2``; negative values mean the bound is vacuous."""
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return 1.0 - level - 0.5 * math.sqrt(math.expm1(kappa**4 / 2))


def sample_prior(prior: ExtremalPrior, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Draw ``kappa * gamma * theta`` with i.i.d. Rademacher signs ``gamma``."""
    shape = prior.theta.shape if size is None else (size,) + prior.theta.shape
    signs = rng.integers(0, 2, size=shape) * 2 - 1
    return prior.kappa * signs * prior.theta

