"""Seeded random streams for reproducible experiments.

All randomness in this package flows through Philox4x64, a counter-based
generator: a (seed, stream) pair maps to an independent stream through
numpy's SeedSequence spawn keys, and draws at a fixed position in a stream
are a pure function of (seed, stream, position).  This is what makes
Monte-Carlo results independent of execution schedule.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "philox4x64"


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for the 64-bit seed and stream index."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(seed=ss))


def keep_masks(seed: int, trials: int, n: int, p: float) -> np.ndarray:
    """(trials, n) boolean keep patterns, entries i.i.d. Bernoulli(p).

    Row i consumes exactly the draws [i*n, (i+1)*n) of the Philox counter,
    so the mask of trial i depends only on (seed, i) and not on how many
    trials are requested or in what order they are consumed.  p = 0 and
    p = 1 short-circuit the generator entirely.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if p <= 0.0:
        return np.zeros((trials, n), dtype=bool)
    if p >= 1.0:
        return np.ones((trials, n), dtype=bool)
    rng = make_rng(seed, stream=0)
    return rng.random((trials, n)) < p
