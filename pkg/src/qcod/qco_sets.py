"""Axis-aligned QCO constraint sets: ellipsoids and hyperrectangles."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set ``{theta : sum(theta_i**2 / a_i) <= 1}``.

    ``a`` holds the squared semi-axes in nondecreasing order. ``order`` maps
    sorted position to the caller's original coordinate, i.e.
    ``a == original_a[order]``.
    """

    a: np.ndarray
    order: np.ndarray = field(default=None)

    def __post_init__(self):
        a = _frozen(self.a, "a")
        if np.any(a <= 0):
            raise ValueError("ellipsoid semi-axes squared must be positive")
        if self.order is None:
            order = np.argsort(a, kind="stable")
            a = _frozen(a[order], "a")
        else:
            order = np.asarray(self.order, dtype=int)
            if np.any(np.diff(a) < 0):
                raise ValueError("a must be nondecreasing when order is given")
        order = np.array(order, dtype=int)
        order.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return self.a.size

    def to_sorted(self, x) -> np.ndarray:
        """Reorder a vector given in original coordinates to sorted coordinates."""
        return np.asarray(x, dtype=float)[self.order]

    def to_original(self, x) -> np.ndarray:
        """Inverse of :meth:`to_sorted`."""
        out = np.empty(self.n)
        out[self.order] = np.asarray(x, dtype=float)
        return out

    def __repr__(self):
        return f"Ellipsoid(n={self.n}, a_min={self.a[0]:.4g}, a_max={self.a[-1]:.4g})"


@dataclass(frozen=True, eq=False)
class Hyperrectangle:
    """The box ``{theta : |theta_i| <= c_i}``; ``c_i = 0`` marks a flat direction."""

    c: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c, "c")
        if np.any(c < 0):
            raise ValueError("hyperrectangle half-widths must be nonnegative")
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.size

    def __repr__(self):
        return f"Hyperrectangle(n={self.n}, c_max={self.c.max():.4g})"


ConstraintSet = Union[Ellipsoid, Hyperrectangle]


def make_sobolev(alpha: float, n: int) -> Ellipsoid:
    """Sobolev-type ellipsoid with ``a_i = (n - i + 1) ** (-2 alpha)``, i = 1..n."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    a = np.arange(n, 0, -1, dtype=float) ** (-2.0 * alpha)
    return Ellipsoid(a, order=np.arange(n))


def _as_vector(theta, n: int) -> np.ndarray:
    x = np.asarray(theta, dtype=float).reshape(-1)
    if x.size != n:
        raise ValueError(f"dimension mismatch: set has n={n}, vector has {x.size}")
    return x


def contains(K: ConstraintSet, theta, tol: float = 1e-9) -> bool:
    """Membership test with additive slack ``tol``.

    ``theta`` is read in the set's stored coordinates (sorted, for ellipsoids).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    x = _as_vector(theta, K.n)
    if isinstance(K, Ellipsoid):
        return bool(np.sum(x**2 / K.a) <= 1.0 + tol)
    return bool(np.all(np.abs(x) <= K.c + tol))


def d0(K: ConstraintSet) -> float:
    """Largest Euclidean norm attained on ``K``."""
    if isinstance(K, Ellipsoid):
        return float(np.sqrt(K.a[-1]))
    return float(np.linalg.norm(K.c))


def derotate(x, u, atol: float = 1e-8) -> np.ndarray:
    """Return ``u.T @ x`` for orthogonal ``u``.

    If ``K = U K'`` with ``K'`` axis-aligned, the rotated observation lives in
    the axis-aligned problem and keeps its isotropic Gaussian noise.
    """
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"u must be a square matrix, got shape {u.shape}")
    if u.shape[0] != x.size:
        raise ValueError(f"dimension mismatch: u is {u.shape}, x has {x.size}")
    dev = np.max(np.abs(u.T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise ValueError(f"u is not orthogonal: max |U^T U - I| = {dev:.3e}")
    return u.T @ x


def read_values(path) -> np.ndarray:
    """Read one real per line; blank lines and lines starting with ``#`` are skipped."""
    vals = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            vals.append(float(s))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number: {s!r}") from None
    if not vals:
        raise ValueError(f"{path}: no values")
    return np.array(vals)


def load_set(path, kind: str) -> ConstraintSet:
    """Build an ellipsoid (values are ``a_i``) or hyperrectangle (values are ``c_i``) from a file."""
    vals = read_values(path)
    if kind == "ellipsoid":
        return Ellipsoid(vals)
    if kind == "hyperrectangle":
        return Hyperrectangle(vals)
    raise ValueError(f"unknown set kind {kind!r}")
