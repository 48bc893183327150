"""Kolmogorov widths, critical indices and rate summaries.

For an ellipsoid with squared semi-axes ``a_1 <= ... <= a_n`` the widths
are ``d_k = sqrt(a_{n-k})`` (with ``a_0 = 0``), attained by projecting onto
the ``k`` longest axes. For a hyperrectangle the same coordinate projection
gives ``sqrt(sum of c_i**2 outside the k largest)``; that value is an upper
bound on the true width and is flagged with ``exact=False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from . import _streams
from .qco_sets import ConstraintSet, Ellipsoid, Hyperrectangle, d0

BRUTE_FORCE_MAX_N = 20


class UntestableError(ValueError):
    """Raised when ``d_0(K) <= sigma``: no level-alpha test has nontrivial power."""


@dataclass(frozen=True)
class WidthProfile:
    d: np.ndarray
    exact: bool

    @property
    def n(self) -> int:
        return self.d.size - 1

    def __getitem__(self, k: int) -> float:
        return float(self.d[k])


@dataclass(frozen=True)
class RateReport:
    sigma: float
    testing_index: Optional[int]
    testing_radius: Optional[float]
    estimation_index: int
    estimation_risk: float

    @property
    def untestable(self) -> bool:
        return self.testing_index is None

    def as_dict(self) -> dict:
        return {
            "testing_index": self.testing_index,
            "testing_radius": self.testing_radius,
            "estimation_index": self.estimation_index,
            "estimation_risk": self.estimation_risk,
            "untestable": self.untestable,
        }


def width_profile(K: ConstraintSet) -> WidthProfile:
    if isinstance(K, Ellipsoid):
        # d_k = sqrt(a_{n-k}); reversed a gives k = 0..n-1, then d_n = 0
        d = np.concatenate([np.sqrt(K.a[::-1]), [0.0]])
        return WidthProfile(d, exact=True)
    c2 = np.sort(K.c**2)  # ascending
    # drop the k largest -> sum of the n-k smallest
    tail = np.concatenate([[0.0], np.cumsum(c2)])[::-1]
    return WidthProfile(np.sqrt(tail), exact=False)


def brute_force_width(K: ConstraintSet, k: int) -> float:
    """Coordinate-subspace width by exhaustive search over index sets of size ``k``."""
    n = K.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute_force_width refuses n={n} > {BRUTE_FORCE_MAX_N}: "
            f"C(n, k) subsets would be enumerated"
        )
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    if isinstance(K, Ellipsoid):
        weights = K.a
        worst = lambda rest: max((weights[i] for i in rest), default=0.0)
    else:
        weights = K.c**2
        worst = lambda rest: sum(weights[i] for i in rest)
    best = math.inf
    everything = set(range(n))
    for S in combinations(range(n), k):
        best = min(best, worst(everything.difference(S)))
    return math.sqrt(best)


def dominant_singular_value(
    m: np.ndarray, rtol: float = 1e-9, max_iter: int = 200_000, seed: int = 0
) -> float:
    """Largest singular value of ``m`` by power iteration on ``m.T @ m``.

    Stops once the eigen-residual ``|G v - lam v|`` falls below ``rtol * lam``.
    """
    g = m.T @ m
    scale = np.max(np.abs(g)) if g.size else 0.0
    if scale == 0.0:
        return 0.0
    v = _streams.derive(seed).standard_normal(g.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = g @ v
        lam = float(v @ w)
        if lam <= 0.0:
            # started in the null space; perturb deterministically
            v = v + 1.0 / np.sqrt(v.size)
            v /= np.linalg.norm(v)
            continue
        if np.linalg.norm(w - lam * v) <= rtol * lam:
            break
        v = w / np.linalg.norm(w)
    return math.sqrt(max(lam, 0.0))


def projection_deficiency(K: Ellipsoid, p, atol: float = 1e-8) -> float:
    """``sup_{theta in K} |theta - P theta|`` for an orthogonal projection matrix ``P``."""
    if not isinstance(K, Ellipsoid):
        raise TypeError("projection_deficiency is defined for ellipsoids")
    p = np.asarray(p, dtype=float)
    if p.shape != (K.n, K.n):
        raise ValueError(f"P must be {K.n}x{K.n}, got {p.shape}")
    asym = np.max(np.abs(p - p.T))
    idem = np.max(np.abs(p @ p - p))
    if asym > atol or idem > atol:
        raise ValueError(
            f"P is not an orthogonal projection: asymmetry {asym:.3e}, "
            f"idempotency defect {idem:.3e}"
        )
    m = (np.eye(K.n) - p) * np.sqrt(K.a)[None, :]
    return dominant_singular_value(m)


def random_projection(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal projection onto a uniformly random ``k``-dimensional subspace."""
    if k == 0:
        return np.zeros((n, n))
    q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return q @ q.T


def random_projection_margins(K: Ellipsoid, k: int, count: int, seed: int = 0) -> np.ndarray:
    """``projection_deficiency(P) - d_k`` over ``count`` random rank-``k`` projections.

    Projection ``i`` is drawn from the stream ``(seed, k, i)``.
    """
    dk = width_profile(K)[k]
    out = np.empty(count)
    for i in range(count):
        p = random_projection(K.n, k, _streams.derive(seed, k, i))
        out[i] = projection_deficiency(K, p) - dk
    return out


def testing_index(profile: WidthProfile, sigma: float) -> Optional[int]:
    """Smallest ``k >= 1`` with ``d_k <= (k+1)**0.25 * sigma``; ``None`` when ``d_0 <= sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    d = profile.d
    if d[0] <= sigma:
        return None
    for k in range(1, d.size):
        if d[k] <= (k + 1) ** 0.25 * sigma:
            return k
    raise AssertionError("unreachable: d_n = 0 always satisfies the crossing")


def lower_bound_index(profile: WidthProfile, sigma: float) -> Optional[int]:
    """``max{j >= 1 : d_{j-1} > j**0.25 * sigma}``, or ``None`` if no such ``j``."""
    d = profile.d
    js = [j for j in range(1, d.size) if d[j - 1] > j**0.25 * sigma]
    return max(js) if js else None


def estimation_index(profile: WidthProfile, sigma: float) -> int:
    """Smallest ``k >= 0`` with ``d_k <= sqrt(k+1) * sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    d = profile.d
    for k in range(d.size):
        if d[k] <= math.sqrt(k + 1) * sigma:
            return k
    raise AssertionError("unreachable: d_n = 0")


def rate_report(K: ConstraintSet, sigma: float) -> RateReport:
    prof = width_profile(K)
    j = testing_index(prof, sigma)
    k = estimation_index(prof, sigma)
    if j is not None:
        assert j + 1 <= (k + 1) ** 2, f"testing index {j} exceeds estimation bound {k}"
    return RateReport(
        sigma=float(sigma),
        testing_index=j,
        testing_radius=None if j is None else j**0.25 * sigma,
        estimation_index=k,
        estimation_risk=min((k + 1) * sigma**2, d0(K) ** 2),
    )


def compare_rates(K: ConstraintSet, sigma: float) -> dict:
    """Testing radius squared next to the estimation risk, on the same scale."""
    rep = rate_report(K, sigma)
    out = rep.as_dict()
    if rep.untestable:
        out.update(testing_radius_sq=None, index_inequality=None, radius_sq_over_risk=None)
    else:
        r2 = rep.testing_radius**2
        out.update(
            testing_radius_sq=r2,
            index_inequality=rep.testing_index + 1 <= (rep.estimation_index + 1) ** 2,
            radius_sq_over_risk=r2 / rep.estimation_risk,
        )
    return out
