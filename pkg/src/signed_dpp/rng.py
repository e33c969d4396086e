"""Seedable random streams.

All randomness in the package flows through counter-based Philox (2x64)
generators keyed by ``(seed, stream)``.  Stream k of a batch job is fully
determined by the user seed and the sample index, so batches can be produced
in any order (or in parallel) and still match the sequential output
byte for byte.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Return the Philox generator for substream ``index`` of ``seed``."""
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not isinstance(index, (int, np.integer)):
        raise TypeError(f"stream index must be an integer, got {type(index).__name__}")
    key = np.array([int(seed) & _MASK64, int(index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class Substreams:
    """Cheap sequential access to the substreams of one seed.

    Re-keys a single Philox instance instead of constructing one per
    index; ``generator(i)`` emits exactly the same values as
    ``stream(seed, i)``.  Not safe for concurrent use; parallel callers
    should construct independent streams via ``stream``.
    """

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)):
            raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
        self._seed = int(seed) & _MASK64
        self._bitgen = np.random.Philox(key=np.array([self._seed, 0], dtype=np.uint64))
        self._gen = np.random.Generator(self._bitgen)
        self._template = self._bitgen.state

    def generator(self, index: int) -> np.random.Generator:
        st = self._template
        st["state"]["key"][:] = (self._seed, int(index) & _MASK64)
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen
