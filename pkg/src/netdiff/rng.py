"""Seeding discipline for reproducible ensembles.

All randomness flows from 64-bit master seeds through counter-based
Philox streams, so run i of an ensemble gets an independent stream
derived as ``seed XOR i`` and members can be generated in any order
(or in parallel) with identical results.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def generator(seed: int) -> np.random.Generator:
    """Philox generator keyed directly by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent stream for ensemble member `index` under `seed`."""
    return generator((seed ^ index) & _MASK64)


def fresh_seed() -> int:
    """Entropy-backed seed for commands invoked without one."""
    return int(np.random.SeedSequence().entropy) & _MASK64
