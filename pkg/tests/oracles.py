"""Independent reference computations used by the tests.

Nothing here imports the package's algorithms; each oracle recomputes its
quantity from the raw definition (plain loops, enumeration, grid search).
"""
import itertools
import math

import numpy as np


def sobolev_axes(alpha, n):
    return [(n - i + 1) ** (-2.0 * alpha) for i in range(1, n + 1)]


def ellipsoid_widths_by_definition(a):
    """d_k = sqrt(a_{n-k}) with a_0 = 0, from a list sorted ascending (1-based formula)."""
    n = len(a)
    a1 = [0.0] + sorted(a)  # a1[i] is a_i in 1-based indexing
    return [math.sqrt(a1[n - k]) for k in range(n + 1)]


def scan_testing_index(d, sigma):
    """Two-sided crossing scan: j with d_{j-1} > j^(1/4) sigma and d_j <= (j+1)^(1/4) sigma."""
    if d[0] <= sigma:
        return None
    hits = [j for j in range(1, len(d)) if d[j - 1] > j ** 0.25 * sigma and d[j] <= (j + 1) ** 0.25 * sigma]
    return hits[0]


def scan_estimation_index(d, sigma):
    k = 0
    while not d[k] <= math.sqrt(k + 1) * sigma:
        k += 1
    return k


def lp_vertex_optimum(weights_inv, cap, box=None):
    """max sum(t) s.t. sum(t_i * weights_inv_i) <= 1, 0 <= t_i <= cap (and t_i <= box_i).

    Enumerates LP vertices: every coordinate sits at a bound except at most
    one, which is set by the tight budget.
    """
    n = len(weights_inv)
    upper = [cap if box is None else min(cap, box[i]) for i in range(n)]
    best = 0.0
    for pattern in itertools.product((0, 1), repeat=n):
        t = [upper[i] if pattern[i] else 0.0 for i in range(n)]
        used = sum(t[i] * weights_inv[i] for i in range(n))
        if used <= 1 + 1e-12:
            best = max(best, sum(t))
        for j in range(n):
            if pattern[j] or weights_inv[j] == 0:
                continue
            rest = used
            free = (1 - rest) / weights_inv[j]
            if 0 <= free <= upper[j]:
                best = max(best, sum(t) + free)
    return best


def sphere_grid_min_projection(a, k, c, steps):
    """Grid search over the positive orthant of the sphere |mu|^2 = c, n in {2, 3}.

    Returns min |P*_k mu| over grid points inside the ellipsoid, P*_k keeping
    the last k coordinates of the ascending-sorted axes.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    r = math.sqrt(c)
    if n == 2:
        phi = np.linspace(0.0, math.pi / 2, steps)
        pts = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    elif n == 3:
        th = np.linspace(0.0, math.pi / 2, steps)
        ph = np.linspace(0.0, math.pi / 2, steps)
        T, P = np.meshgrid(th, ph, indexing="ij")
        pts = np.stack(
            [r * np.sin(T) * np.cos(P), r * np.sin(T) * np.sin(P), r * np.cos(T)], axis=-1
        ).reshape(-1, 3)
    else:
        raise ValueError("grid oracle supports n in {2, 3}")
    inside = (pts**2 / a).sum(axis=1) <= 1.0 + 1e-12
    if not inside.any():
        return None
    proj = np.sqrt((pts[inside][:, n - k:] ** 2).sum(axis=1))
    return float(proj.min())
