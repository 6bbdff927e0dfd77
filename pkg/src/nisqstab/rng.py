"""Seeded random streams.

Every stochastic routine takes a 64-bit master seed and derives child
streams from it by label, so runs are reproducible and each rep/pair/seed
can be evaluated independently (in any order, or in parallel) without
changing the result.

The child key is the first 8 bytes (little endian) of
``blake2b(f"{seed}/{label}")``; the generator is numpy's PCG64.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def child_seed(seed: int, label: str) -> int:
    """64-bit key of the child stream ``label`` under ``seed``."""
    digest = hashlib.blake2b(f"{int(seed) & MASK64}/{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int, label: str | None = None) -> np.random.Generator:
    """PCG64 generator for ``seed``, or for its child stream ``label``."""
    key = int(seed) & MASK64 if label is None else child_seed(seed, label)
    return np.random.Generator(np.random.PCG64(key))
