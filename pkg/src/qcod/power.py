"""Minimal power of the projection test over an ellipsoid.

The power of the ``T' = max(X^T P Y, 0)`` test only depends on ``|P mu|``
and increases with it, so the worst alternative of a given norm is the one
minimising ``|P mu|``. :func:`minimal_power_vector` gives it in closed form
and :func:`power_curve` traces the resulting minimal power against ``|mu|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _streams
from .detection import CalibratedTest, StatKind, mc_calibrate, optimal_projection, statistic
from .qco_sets import Ellipsoid, contains
from .widths import UntestableError, testing_index, width_profile

MIN_POWER_REPS = 100


class MinimalPowerPoint(NamedTuple):
    mu: np.ndarray
    projected_sq: float  # |P*_k mu|^2
    case: str  # "full", "low", "split"
    degenerate: bool


class PowerEstimate(NamedTuple):
    power: float
    stderr: float


@dataclass(frozen=True)
class PowerCurve:
    norms: np.ndarray
    powers: np.ndarray
    stderrs: np.ndarray
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DominanceReport:
    passed: bool
    low: PowerEstimate
    high: PowerEstimate
    projected_sq_low: float
    projected_sq_high: float


def minimal_power_vector(K: Ellipsoid, k: int, c: float) -> MinimalPowerPoint:
    """Vector of squared norm ``c`` in ``K`` minimising ``|P*_k mu|``.

    ``P*_k`` keeps the ``k`` longest axes (the last ``k`` stored coordinates).
    With ``a_lo = a_{n-k}`` (1-based) the minimiser is ``sqrt(c)`` on the
    last axis when ``k = n``, ``sqrt(c)`` on axis ``n-k`` when ``c < a_lo``,
    and otherwise splits the mass between axes ``n-k`` and ``n`` so that the
    ellipsoid constraint is tight.
    """
    if not isinstance(K, Ellipsoid):
        raise TypeError("minimal_power_vector is defined for ellipsoids")
    n, a = K.n, K.a
    if int(k) != k or not 0 <= k <= n:
        raise ValueError(f"k must be an integer in [0, {n}], got {k}")
    k = int(k)
    an = a[-1]
    if c < 0 or c > an * (1 + 1e-12):
        raise ValueError(f"c must lie in [0, a_n = {an}], got {c}")
    c = min(float(c), an)

    mu = np.zeros(n)
    degenerate = False
    if k == n:
        mu[-1] = math.sqrt(c)
        case, proj = "full", c
    elif c < a[n - k - 1]:
        mu[n - k - 1] = math.sqrt(c)
        case, proj = "low", 0.0
    else:
        alo = a[n - k - 1]
        denom = 1.0 / alo - 1.0 / an
        case = "split"
        if denom <= 0:
            # a_lo == a_n forces c == a_n; all mass goes on the last axis
            degenerate = True
            mu[-1] = math.sqrt(c)
            proj = c
        else:
            low_sq = max((1.0 - c / an) / denom, 0.0)
            proj = max((c / alo - 1.0) / denom, 0.0)
            mu[n - k - 1] = math.sqrt(low_sq)
            mu[-1] = math.sqrt(proj)

    assert abs(np.sum(mu**2) - c) <= 1e-10 * max(1.0, c), "norm postcondition"
    assert contains(K, mu, 1e-9), "membership postcondition"
    mu.setflags(write=False)
    return MinimalPowerPoint(mu, float(proj), case, degenerate)


def mc_power(test: CalibratedTest, mu, reps: int = 1000, seed: int = 0, keys=()) -> PowerEstimate:
    """Rejection frequency of ``test`` when ``X, Y ~ N(mu, s2 I)`` independently.

    ``s2`` is ``test.sample_variance``; only the projected coordinates of
    ``mu`` are simulated since the statistic ignores the rest.
    """
    if reps < MIN_POWER_REPS:
        raise ValueError(f"reps must be at least {MIN_POWER_REPS}, got {reps}")
    mu_proj = test.projection.apply(np.asarray(mu, dtype=float).reshape(-1))
    k = test.projection.k
    sd = math.sqrt(test.sample_variance)

    def draw(rng, size):
        noise = rng.standard_normal((2, size, k)) * sd
        z = np.einsum("ij,ij->i", mu_proj + noise[0], mu_proj + noise[1])
        return (statistic(test.kind, z) > test.threshold).astype(np.float64)

    hits = _streams.blocked(seed, (_streams.POWER, *keys), reps, draw)
    p = float(hits.mean())
    return PowerEstimate(p, math.sqrt(p * (1.0 - p) / reps))


def norm_grid(K: Ellipsoid, grid_size: int) -> np.ndarray:
    """``grid_size`` equispaced norms from 0 to ``sqrt(a_n)`` inclusive."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    return np.linspace(0.0, math.sqrt(K.a[-1]), grid_size)


def power_curve(
    K: Ellipsoid,
    sigma: float,
    level: float = 0.05,
    grid_size: int = 10,
    reps: int = 1000,
    calib_reps: int = 100_000,
    kind=StatKind.T_PLUS,
    seed: int = 0,
) -> PowerCurve:
    """Minimal power of the calibrated projection test along a norm grid.

    The observation noise is ``sigma``; after sample splitting both halves
    carry variance ``2 sigma^2``, which is used for calibration and power.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    kind = StatKind(kind)
    k = testing_index(width_profile(K), sigma)
    if k is None:
        raise UntestableError(
            f"untestable: d0 <= sigma (d0 = {math.sqrt(K.a[-1]):.6g}, sigma = {sigma:.6g})"
        )
    s2 = 2.0 * sigma**2
    test = mc_calibrate(optimal_projection(K, k), s2, level, calib_reps, seed, kind)
    norms = norm_grid(K, grid_size)
    powers = np.empty(grid_size)
    stderrs = np.empty(grid_size)
    for i, r in enumerate(norms):
        point = minimal_power_vector(K, k, r * r)
        est = mc_power(test, point.mu, reps, seed, keys=(i,))
        powers[i], stderrs[i] = est
    config = {
        "n": K.n,
        "sigma": float(sigma),
        "level": float(level),
        "k": int(k),
        "threshold": test.threshold,
        "reps": int(reps),
        "calib_reps": int(calib_reps),
        "seed": int(seed),
        "statistic": kind.value,
    }
    return PowerCurve(norms, powers, stderrs, config)


def dominance_check(
    K: Ellipsoid,
    k: int,
    c_low: float,
    c_high: float,
    test: CalibratedTest,
    reps: int = 1000,
    seed: int = 0,
) -> DominanceReport:
    """Check that power at squared norm ``c_high`` is not below power at ``c_low``.

    Passes iff ``power_high >= power_low - 3 (se_low + se_high)``. The two
    estimates use independent streams.
    """
    lo = minimal_power_vector(K, k, c_low)
    hi = minimal_power_vector(K, k, c_high)
    if lo.projected_sq > hi.projected_sq:
        raise ValueError(
            f"|P mu_low|^2 = {lo.projected_sq:.6g} exceeds |P mu_high|^2 = {hi.projected_sq:.6g}"
        )
    est_lo = mc_power(test, lo.mu, reps, seed, keys=(0,))
    est_hi = mc_power(test, hi.mu, reps, seed, keys=(1,))
    ok = est_hi.power >= est_lo.power - 3.0 * (est_lo.stderr + est_hi.stderr)
    return DominanceReport(bool(ok), est_lo, est_hi, lo.projected_sq, hi.projected_sq)
