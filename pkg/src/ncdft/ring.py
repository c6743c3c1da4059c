"""Shared circular sample buffer.

One buffer serves every bin of the engine: each analysis window is just
a different-length suffix of the same history, so the expiring sample
for a bin with window N is simply the sample N pushes back.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SharedRingBuffer"]


class SharedRingBuffer:
    """Fixed-capacity ring of 16-bit samples with a monotone write cursor.

    The buffer starts zero-filled, which doubles as the cold-start
    state: lags that reach past the first push read as silence.
    Single-writer only; there is no synchronisation.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        self.capacity = int(capacity)
        self._data = np.zeros(self.capacity, dtype=np.int16)
        self._written = 0  # total samples pushed since creation

    @property
    def write_cursor(self) -> int:
        return self._written

    def push(self, sample: int) -> None:
        """Append one sample, overwriting the oldest slot."""
        self._data[self._written % self.capacity] = sample
        self._written += 1

    def push_block(self, samples: np.ndarray) -> None:
        """Append a block of int16 samples in one shot."""
        samples = np.asarray(samples, dtype=np.int16)
        n = samples.shape[0]
        if n == 0:
            return
        if n >= self.capacity:
            # Only the tail survives anyway.
            self._data[:] = np.roll(samples[-self.capacity:], self._written + n)
            self._written += n
            return
        start = self._written % self.capacity
        end = start + n
        if end <= self.capacity:
            self._data[start:end] = samples
        else:
            split = self.capacity - start
            self._data[start:] = samples[:split]
            self._data[: end - self.capacity] = samples[split:]
        self._written += n

    def sample_at_lag(self, lag: int) -> int:
        """Sample written `lag` pushes ago (lag 1 is the most recent).

        Returns 0 for lags that reach past the first push.
        """
        if not 1 <= lag <= self.capacity:
            raise ValueError(
                f"lag must be in [1, {self.capacity}], got {lag}"
            )
        if lag > self._written:
            return 0
        return int(self._data[(self._written - lag) % self.capacity])

    def clear(self) -> None:
        """Return to the freshly constructed all-zero state."""
        self._data[:] = 0
        self._written = 0

    @property
    def data(self) -> np.ndarray:
        """Raw storage, indexed by absolute position mod capacity."""
        return self._data
