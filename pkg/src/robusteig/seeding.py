"""Deterministic derivation of independent random substreams.

Every source of randomness in this package flows from an integer root seed
through ``numpy.random.SeedSequence`` with an explicit ``spawn_key`` path.
The scheme is stable across runs and platforms, and adding consumers with a
new path component never perturbs existing streams (e.g. adding nodes to a
simulated trial leaves the earlier nodes' data untouched).

Path components are masked to uint32 so that negative integers (grid
exponents can be negative) map to a fixed, documented key.
"""

from __future__ import annotations

import numpy as np

_MASK32 = 0xFFFFFFFF


def substream(root: int, *path: int) -> np.random.SeedSequence:
    """SeedSequence for the substream identified by ``path`` under ``root``."""
    key = tuple(int(p) & _MASK32 for p in path)
    return np.random.SeedSequence(int(root), spawn_key=key)


def substream_rng(root: int, *path: int) -> np.random.Generator:
    """Generator seeded on the corresponding substream."""
    return np.random.default_rng(substream(root, *path))


def substream_seed(root: int, *path: int) -> int:
    """64-bit integer seed derived from a substream.

    For APIs that take a plain integer seed rather than a Generator.
    """
    state = substream(root, *path).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
