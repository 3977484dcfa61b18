"""Deterministic seed derivation.

Every random stage gets its own seed computed from the master seed and a path
of keys (trial index, grid value, stage tag), so any single stage can be rerun
in isolation and produce the same draws.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _key(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode()) | (1 << 40)
    return int(k) & _MASK


def derive_seed(master: int, *keys) -> int:
    """Fold ``keys`` (ints or stage-tag strings) into ``master``."""
    s = splitmix64(int(master) & _MASK)
    for k in keys:
        s = splitmix64(s ^ _key(k))
    return s


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
