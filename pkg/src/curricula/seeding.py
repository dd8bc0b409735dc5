"""Deterministic derivation of independent random streams.

Every random decision in the library (corpus noise, subset sampling,
shuffling, mixing) draws from a generator derived from a master seed plus a
chain of purpose tags, so separate concerns never share a stream and every
run is exactly replayable.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _fold(tag: int | str) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    return int(tag) & _MASK64


def derive_rng(master_seed: int, *tags: int | str) -> np.random.Generator:
    """Return a PCG64 generator keyed by (master_seed, *tags).

    String tags are folded to 32-bit ints with CRC32, so the derivation is
    stable across processes and platforms.
    """
    key = [int(master_seed) & _MASK64] + [_fold(t) for t in tags]
    return np.random.default_rng(key)


def derive_seed(master_seed: int, *tags: int | str) -> int:
    """Return a 64-bit child seed keyed by (master_seed, *tags)."""
    key = [int(master_seed) & _MASK64] + [_fold(t) for t in tags]
    return int(np.random.SeedSequence(key).generate_state(1, np.uint64)[0])
