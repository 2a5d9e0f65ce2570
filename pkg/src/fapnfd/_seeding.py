"""Seed splitting.

Every random stream in the package is derived from one master seed and a
tuple of non-negative integer keys (replication index, generation, slot,
...) through :func:`derive_seed`.  The mapping is numpy's ``SeedSequence``
with the keys as its spawn key, so streams are independent and stable
across platforms and numpy versions.
"""
import zlib

import numpy as np


def derive_seed(master, *keys):
    """Return a 64-bit seed for the stream addressed by ``keys``."""
    spawn_key = tuple(_key(k) for k in keys)
    ss = np.random.SeedSequence(entropy=int(master) & (2**64 - 1), spawn_key=spawn_key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(master, *keys):
    return np.random.default_rng(derive_seed(master, *keys))


def _key(k):
    if isinstance(k, str):
        return zlib.crc32(k.encode("utf8"))
    k = int(k)
    if k < 0:
        raise ValueError("seed keys must be non-negative")
    return k
