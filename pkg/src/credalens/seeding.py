"""Deterministic seed derivation.

Every source of randomness in the engine draws from a seed derived with
:func:`derive_seed` from the run's master seed plus a path of integers
naming the work unit (model index, fold, tree, instance, ...).  Results are
therefore independent of evaluation order and worker count.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, (z ^ (z >> 31)) & _MASK


def derive_seed(master: int, *path: int) -> int:
    """Mix a master seed with a path of work-unit indices into a 64-bit seed."""
    state = master & _MASK
    state, out = splitmix64(state)
    for part in path:
        state = (state ^ ((part & _MASK) * 0xD6E8FEB86659FD93)) & _MASK
        state, out = splitmix64(state)
    return out


def rng_from(master: int, *path: int) -> np.random.Generator:
    """A numpy Generator seeded from the derived seed."""
    return np.random.default_rng(derive_seed(master, *path))
