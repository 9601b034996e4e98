"""Deterministic random streams derived from a single root seed.

Every stream is addressed by ``(root seed, purpose tag, index)`` through
``numpy.random.SeedSequence`` spawn keys. Work split into chunks by index
gives the same numbers regardless of how many processes run them.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "MAX_SEED"]

MAX_SEED = 2**64 - 1


def make_rng(seed: int, *key: int) -> np.random.Generator:
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))
