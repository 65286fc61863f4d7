"""Deterministic hierarchical random streams.

Every stochastic choice in the package derives from a single root seed
through ``derive(root_seed, *path)``.  The path (module name, stage,
task index, ...) is hashed into a ``SeedSequence`` spawn key and fed to
the counter-based Philox generator, so any task obtains the same stream
no matter how work is scheduled across threads or processes.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream path integers must be nonnegative")
        return int(part) & 0xFFFFFFFF
    h = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(h[:4], "big")


def derive(root_seed: int, *path) -> np.random.Generator:
    """Generator for the stream identified by (root_seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(root_seed) & (2**63 - 1),
                                spawn_key=tuple(_key(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
