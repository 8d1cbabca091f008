"""Seeded 64-bit mixing used for sketch hash families and shard assignment.

Scalar and vector forms must produce identical values: shard placement and
sketch contents are part of the deterministic output contract, so nothing
here may depend on process-level hash randomization.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_PHI64 = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """Finalizer-style 64-bit mix of a nonnegative integer."""
    z = (x + _PHI64) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vector form of :func:`mix64`; wraps mod 2**64 like the scalar form."""
    z = x.astype(np.uint64, copy=True)
    z += np.uint64(_PHI64)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return z


def shard_of(node: int, shard_count: int) -> int:
    return mix64(node) % shard_count


def shard_of_array(nodes: np.ndarray, shard_count: int) -> np.ndarray:
    return (mix64_array(nodes) % np.uint64(shard_count)).astype(np.int64)
