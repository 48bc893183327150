"""Seed derivation for Monte Carlo work.

Every random draw in the package comes from a stream keyed by
``(seed, *keys)`` through :class:`numpy.random.SeedSequence` spawn keys.
Replications are generated in fixed-size blocks and block ``b`` always
uses the stream ``(seed, *keys, b)``, so results do not depend on how many
worker threads process the blocks or in which order they finish.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

BLOCK_SIZE = 10_000

# purpose tags keep unrelated simulations on disjoint streams
CALIBRATE = 1
POWER = 2
PRIOR = 3


def derive(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream ``(seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def thread_count() -> int:
    cap = os.environ.get("QCOD_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def blocked(
    seed: int,
    keys: Sequence[int],
    reps: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
) -> np.ndarray:
    """Concatenate ``draw(rng_b, size_b)`` over the blocks covering ``reps``.

    ``draw`` must return a 1-d array of length ``size_b``.
    """
    sizes = [BLOCK_SIZE] * (reps // BLOCK_SIZE)
    if reps % BLOCK_SIZE:
        sizes.append(reps % BLOCK_SIZE)

    def run(b: int) -> np.ndarray:
        return draw(derive(seed, *keys, b), sizes[b])

    workers = thread_count()
    if workers == 1 or len(sizes) == 1:
        parts = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    return np.concatenate(parts) if parts else np.empty(0)
