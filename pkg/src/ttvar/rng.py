"""Seeded random streams.

All randomness flows through Philox-4x64 (a counter-based generator) keyed
by a :class:`numpy.random.SeedSequence`.  Child streams are addressed by a
path of keys ``(master_seed, key1, key2, ...)``; string keys are mapped to
integers with the first 8 bytes of their SHA-256 digest, so a stream depends
only on its own path and never on how many other streams were drawn first.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError("integer stream keys must be non-negative")
        return int(key)
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def seed_sequence(seed: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=_key_to_int(seed),
                                  spawn_key=tuple(_key_to_int(k) for k in path))


def generator(seed: int, *path) -> np.random.Generator:
    """Return an independent Philox generator for ``(seed, *path)``."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *path)))


def child_seed(seed: int, *path) -> int:
    """A 63-bit integer seed derived from ``(seed, *path)``."""
    return int(seed_sequence(seed, *path).generate_state(1, np.uint64)[0] >> np.uint64(1))
