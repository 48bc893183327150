"""Projection tests for H0: mu = 0 against separated alternatives in K.

Two observations ``X, Y`` with independent noise of per-coordinate variance
``s2`` are combined through the bilinear statistic ``Z' = X^T P Y`` where
``P`` is a coordinate projection. Under the null ``Z'`` has mean 0 and
variance ``s2**2 * k``. A single observation with noise level ``sigma`` is
turned into such a pair by :func:`split_sample`, giving ``s2 = 2 sigma**2``.

Coordinate indices are 0-based throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _streams
from .qco_sets import ConstraintSet, Ellipsoid

MIN_CALIBRATION_REPS = 1000


class StatKind(str, enum.Enum):
    ABS_Z = "absz"
    T_PLUS = "tplus"


@dataclass(frozen=True)
class CoordinateProjection:
    indices: tuple
    n: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate projection indices: {self.indices}")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ValueError(f"projection indices must lie in [0, {self.n}), got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n))
        p[self.indices, self.indices] = 1.0
        return p

    def apply(self, x) -> np.ndarray:
        """Coordinates of ``x`` kept by the projection (length ``k``)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"dimension mismatch: projection has n={self.n}, got {x.shape[-1]}")
        return x[..., list(self.indices)]


@dataclass(frozen=True)
class CalibratedTest:
    projection: CoordinateProjection
    sample_variance: float
    level: float
    threshold: float
    kind: StatKind = StatKind.T_PLUS
    provenance: dict = field(default_factory=lambda: {"method": "theoretical"})

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if not self.sample_variance > 0:
            raise ValueError("sample_variance must be positive")
        object.__setattr__(self, "kind", StatKind(self.kind))


class Decision(NamedTuple):
    reject: bool
    statistic: float


def optimal_projection(K: ConstraintSet, k: int) -> CoordinateProjection:
    """Rank-``k`` coordinate projection attaining the coordinate width ``d_k``.

    Ellipsoids (stored sorted) keep the last ``k`` coordinates; hyperrectangles
    keep the ``k`` largest half-widths, ties going to the smaller index.
    """
    n = K.n
    if int(k) != k or not 0 <= k <= n:
        raise ValueError(f"k must be an integer in [0, {n}], got {k}")
    k = int(k)
    if isinstance(K, Ellipsoid):
        return CoordinateProjection(tuple(range(n - k, n)), n)
    order = np.lexsort((np.arange(n), -K.c))
    return CoordinateProjection(tuple(order[:k]), n)


def split_sample(x, sigma: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Turn ``X ~ N(mu, sigma^2 I)`` into two independent ``N(mu, 2 sigma^2 I)`` draws."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float).reshape(-1)
    eta = np.asarray(rng.normal(0.0, sigma, size=x.size), dtype=float)
    return x + eta, x - eta


def statistic_zprime(x, y, p: CoordinateProjection) -> float:
    """``Z' = x^T P y``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return float(np.dot(p.apply(x), p.apply(y)))


def statistic(kind, zprime):
    """``|Z'|`` or ``max(Z', 0)``; works elementwise on arrays."""
    kind = StatKind(kind)
    if kind is StatKind.ABS_Z:
        return np.abs(zprime)
    return np.maximum(zprime, 0.0)


def theoretical_threshold(level: float, sample_variance: float, k: int) -> float:
    """Chebyshev threshold ``sqrt(1/level) * s2 * sqrt(k)``.

    Null rejection of ``|Z'|`` above it is at most ``level``.
    """
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if not sample_variance > 0:
        raise ValueError("sample_variance must be positive")
    if k < 1:
        raise ValueError("k must be at least 1: a rank-0 projection gives a degenerate statistic")
    return math.sqrt(1.0 / level) * sample_variance * math.sqrt(k)


def theoretical_test(
    p: CoordinateProjection, sample_variance: float, level: float, kind=StatKind.T_PLUS
) -> CalibratedTest:
    thr = theoretical_threshold(level, sample_variance, p.k)
    return CalibratedTest(p, sample_variance, level, thr, StatKind(kind), {"method": "theoretical"})


def null_zprime(k: int, sample_variance: float, reps: int, seed: int, *keys: int) -> np.ndarray:
    """``reps`` draws of ``Z'`` under the null for a rank-``k`` projection."""
    def draw(rng, size):
        xy = rng.standard_normal((2, size, k))
        return np.einsum("ij,ij->i", xy[0], xy[1]) * sample_variance

    return _streams.blocked(seed, keys, reps, draw)


def order_statistic_index(level: float, reps: int) -> int:
    """1-based rank ``ceil((1 - level) * reps)`` of the calibration quantile."""
    # round first so that e.g. 0.95 * 100000 is not pushed to 95001
    return max(1, math.ceil(round((1.0 - level) * reps, 9)))


def mc_calibrate(
    p: CoordinateProjection,
    sample_variance: float,
    level: float,
    reps: int = 100_000,
    seed: int = 0,
    kind=StatKind.T_PLUS,
) -> CalibratedTest:
    """Threshold at the empirical ``1 - level`` quantile of simulated null statistics."""
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if reps < MIN_CALIBRATION_REPS:
        raise ValueError(f"reps must be at least {MIN_CALIBRATION_REPS}, got {reps}")
    if p.k < 1:
        raise ValueError("cannot calibrate a rank-0 projection")
    kind = StatKind(kind)
    z = null_zprime(p.k, sample_variance, reps, seed, _streams.CALIBRATE)
    stats = np.sort(statistic(kind, z))
    thr = float(stats[order_statistic_index(level, reps) - 1])
    if thr <= 0:
        raise ValueError(
            f"calibrated threshold is {thr}; level {level} is too large for statistic {kind.value}"
        )
    prov = {"method": "monte_carlo", "reps": int(reps), "seed": int(seed)}
    return CalibratedTest(p, float(sample_variance), float(level), thr, kind, prov)


def run_test(test: CalibratedTest, x, y) -> Decision:
    """Reject when the statistic strictly exceeds the threshold."""
    z = statistic_zprime(x, y, test.projection)
    t = float(statistic(test.kind, z))
    return Decision(t > test.threshold, t)


def radius_bound(k: int, sigma: float, level: float, type2: float, cw_constant: float = 1.0) -> float:
    """Additive term ``C*^2 delta^-2 (2 sqrt(1/level) sigma^2 sqrt(k))``.

    The ``|Z'|`` test has type II error below ``type2`` once
    ``rho^2 >= d_k^2 + radius_bound(...)``. ``cw_constant`` is the
    anti-concentration constant, which has no certified numerical value;
    the default 1.0 is a placeholder.
    """
    if k < 1 or not sigma > 0 or not cw_constant > 0:
        raise ValueError("k, sigma and cw_constant must be positive")
    if not 0 < level < 1 or not 0 < type2 <= 1:
        raise ValueError("level must lie in (0, 1) and type2 in (0, 1]")
    c = math.sqrt(1.0 / level)
    return cw_constant**2 / type2**2 * (2.0 * c * sigma**2 * math.sqrt(k))
