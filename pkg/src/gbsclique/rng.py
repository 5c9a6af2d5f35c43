"""Seeded, splittable random streams.

Every public operation that takes a ``seed`` derives its own Philox stream
from ``(seed, tag, index)``, so trial ``k`` of an experiment draws the same
numbers no matter how trials are scheduled.
"""
from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _tag_word(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str = "", index: int = 0) -> np.random.Generator:
    """Return an independent Philox generator for ``(seed, tag, index)``."""
    if seed < 0:
        raise ValueError("seed must be a non-negative 64-bit integer")
    seed &= MASK64
    ss = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, _tag_word(tag), int(index)])
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, tag: str, index: int = 0) -> int:
    """A derived 64-bit seed, for handing to another seeded operation."""
    return int(stream(seed, tag, index).integers(0, 2**63, dtype=np.int64))
