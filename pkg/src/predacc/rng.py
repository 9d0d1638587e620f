"""Reproducible random streams.

A stream is identified by a master seed and an integer key path (for example
``(cell, replication)``); :func:`substream` turns that identity into an
independent PCG64 generator through NumPy's ``SeedSequence`` spawn keys, so
a replication's draws never depend on which worker produced them.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

RandomStream = np.random.Generator


def substream(master_seed: int, *key: int) -> RandomStream:
    """Generator for stream ``key`` under ``master_seed``."""
    if int(master_seed) < 0 or any(int(k) < 0 for k in key):
        raise DomainError("seeds and stream keys must be non-negative integers")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
