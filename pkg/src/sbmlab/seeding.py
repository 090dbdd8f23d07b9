"""Deterministic per-operation random streams.

Every stochastic operation derives its generator from (seed, tag, indices)
so that independent trials and sub-steps never share a stream.
"""

import zlib

import numpy as np


def stream(seed, tag, *indices):
    """Return a Generator keyed by a 64-bit seed, an operation tag and trial indices."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(tag.encode("utf-8"))]
    key.extend(int(i) for i in indices)
    return np.random.default_rng(np.random.SeedSequence(key))
