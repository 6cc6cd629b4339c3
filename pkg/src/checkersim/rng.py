"""Seeded random stream shared by the Python API and the compiled kernels.

The generator is splitmix64: the state advances by the 64-bit golden-ratio
increment and each output is the state passed through the splitmix64 finaliser.
A uniform double takes the top 53 bits; an index in ``[0, n)`` is
``floor(u * n)``. Only integer arithmetic and one IEEE multiply are involved,
so streams are identical on every platform.
"""

from __future__ import annotations

import numpy as np

from . import _engine

MASK64 = (1 << 64) - 1


def _u64(value: int) -> np.uint64:
    if not 0 <= int(value) <= MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {value}")
    return np.uint64(int(value))


class RandomSource:
    """Deterministic stream of uniform draws fully determined by a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.state = np.array([_u64(seed)], dtype=np.uint64)

    def next_u64(self) -> int:
        return int(_engine.next_u64(self.state))

    def uniform(self) -> float:
        return float(_engine.uniform(self.state))

    def index(self, n: int) -> int:
        if n < 1:
            raise ValueError("cannot draw an index from an empty range")
        return int(_engine.pick(self.state, n))

    def __repr__(self):
        return f"RandomSource(seed={self.seed})"


def derive_match_seed(master_seed: int, index: int) -> int:
    """Seed of match ``index`` under ``master_seed``.

    This is output ``index + 1`` of a splitmix64 stream seeded with
    ``master_seed``, so it is injective in ``index`` for a fixed master seed.
    """
    if index < 0:
        raise ValueError("index must be non-negative")
    return int(_engine.derive_seed(_u64(master_seed), _u64(index)))


def derive_match_seeds(master_seed: int, start: int, count: int) -> np.ndarray:
    return _engine.derive_seeds(_u64(master_seed), int(start), int(count))
