"""Counter-based deterministic random streams.

Every consumer of randomness gets its own stream keyed by a path of
integers (seed, frame, track id, purpose, ...).  Draws are a pure
function of (key, counter), so results never depend on the order in
which tracks or frames are processed, and any stream can be replayed
in isolation.  The generator is the SplitMix64 finalizer evaluated at
successive counter values.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


def _mix(z: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced mod 2**64."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MULT_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MULT_B) & _MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 finalizer on a uint64 array (wraps mod 2**64)."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MULT_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MULT_B)
    z ^= z >> np.uint64(31)
    return z


def _fold(key: int, part: int) -> int:
    """Absorb one path element into the running key."""
    return _mix(key ^ _mix((int(part) + _GOLDEN) & _MASK64))


class CounterRng:
    """Deterministic stream addressed by an integer key path.

    ``CounterRng(a, b).spawn(c)`` draws the same values as
    ``CounterRng(a, b, c)``; spawning never consumes state from the
    parent.
    """

    __slots__ = ("_key", "_counter")

    def __init__(self, *path: int) -> None:
        key = 0
        for part in path:
            key = _fold(key, part)
        self._key = key
        self._counter = 0

    def spawn(self, *path: int) -> "CounterRng":
        child = CounterRng.__new__(CounterRng)
        key = self._key
        for part in path:
            key = _fold(key, part)
        child._key = key
        child._counter = 0
        return child

    def uniforms(self, n: int) -> np.ndarray:
        """Next `n` doubles in [0, 1), advancing the counter."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        z = np.uint64(self._key & _MASK64) + idx * np.uint64(_GOLDEN)
        bits = _mix_array(z)
        return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniform(self, lo: float, hi: float, size: int) -> np.ndarray:
        return lo + (hi - lo) * self.uniforms(size)

    def signed(self, size: int) -> np.ndarray:
        """Draws in [-1, 1)."""
        return 2.0 * self.uniforms(size) - 1.0

    def uniform_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.uniforms(rows * cols).reshape(rows, cols)
