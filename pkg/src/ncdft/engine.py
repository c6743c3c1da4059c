"""Streaming NC spectral engine over 16-bit integer accumulators.

Each planned bin correlates the input against two reference tones one
DFT bin apart, using integer reference tables and 64-bit accumulators
updated by a sliding window: every new sample is added with the table
entry it meets on arrival, and the sample leaving the window is removed
with the identical entry it was added with.  Additions and removals
therefore cancel exactly and the accumulators cannot drift, no matter
how long the stream runs.

The reference phases are anchored to stream time, not window time, so
reading a bin applies a corrective rotation to each accumulator pair
before the two sides are combined into max(0, -(dot product)).  That
combination responds only between the two reference frequencies, which
is what buys the halved bandwidth without any window function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from ._kernel import accumulate
from .ring import SharedRingBuffer
from .scale import BinPlan
from .signals import FULL_SCALE

__all__ = [
    "REF_SCALE",
    "ReferenceTable",
    "NcBinState",
    "SpectrumFrame",
    "NcEngine",
    "rotate_accumulators",
    "nc_combine",
]

REF_SCALE = 1 << 15  # fixed-point scale of the reference tables

_CHUNK = 4096  # internal block granularity; results do not depend on it


@dataclass(frozen=True)
class ReferenceTable:
    """Integer sine/cosine lookup covering 2N phase steps.

    Entry q holds round(R sin(pi q / N)) (and the cosine counterpart)
    with R = 2^15.  A bin side with half-period count M' walks the table
    M' steps per sample, which traces out its reference tone exactly;
    after 2N samples every walk returns to its start, so the table wraps
    with no accumulation of phase error.  The second half is the exact
    negation of the first, which the engine's subtract path relies on.
    """

    window_len: int
    cos_values: np.ndarray
    sin_values: np.ndarray

    @property
    def length(self) -> int:
        return 2 * self.window_len

    @classmethod
    def for_window(cls, window_len: int) -> "ReferenceTable":
        q = np.arange(window_len, dtype=np.float64)
        angles = np.pi * q / window_len
        half_cos = np.rint(REF_SCALE * np.cos(angles)).astype(np.int32)
        half_sin = np.rint(REF_SCALE * np.sin(angles)).astype(np.int32)
        return cls(
            window_len=window_len,
            cos_values=np.concatenate([half_cos, -half_cos]),
            sin_values=np.concatenate([half_sin, -half_sin]),
        )


@dataclass(frozen=True)
class NcBinState:
    """Point-in-time view of one bin's engine state."""

    plan: BinPlan
    ref: ReferenceTable
    accumulators: tuple  # (re_left, im_left, re_right, im_right)
    phase_index_l: int
    phase_index_r: int
    smoothed_output: float


@dataclass(frozen=True)
class SpectrumFrame:
    """One spectral snapshot: smoothed display magnitudes plus raws."""

    sample_position: int
    magnitudes: np.ndarray
    raw_magnitudes: np.ndarray


def rotate_accumulators(re: float, im: float, phase_index: int, window_len: int):
    """Undo the stream-time phase a reference has accumulated.

    phase_index is the integer phase in units of pi / window_len.  The
    returned pair is the accumulator as if its reference had started
    from phase zero at the window, which is the alignment the NC
    combination needs.  Norm is preserved.
    """
    theta = math.pi * phase_index / window_len
    c = math.cos(theta)
    s = math.sin(theta)
    return re * c + im * s, im * c - re * s


def nc_combine(re_l: float, im_l: float, re_r: float, im_r: float) -> float:
    """Combine two rotated accumulator pairs into one NC power value.

    Positive only when the two sides sit in anti-phase, which happens
    exactly for tones between the two reference frequencies; everywhere
    else the dot product is non-negative and the result clamps to zero.
    """
    return max(0.0, -(re_l * re_r + im_l * im_r))


class NcEngine:
    """Bank of NC bins fed from one shared sample stream.

    Accepts any list of BinPlans (normally from plan_bank).  Magnitudes
    are calibrated per bin so a sustained full-scale tone at a bin's
    quantized center reads 1.0; the constants come from the float
    reference path unless supplied explicitly.
    """

    def __init__(self, plans, sample_rate, calibrations=None):
        if not plans:
            raise ValueError("at least one BinPlan is required")
        for p in plans:
            if p.window_len < 3:
                raise ValueError(f"bin {p.index}: window_len must be >= 3")
            if p.half_periods < 2:
                raise ValueError(
                    f"bin {p.index}: half_periods must be >= 2 so both "
                    f"references have positive frequency"
                )
        self.plans = list(plans)
        self.sample_rate = float(sample_rate)
        n_bins = len(self.plans)

        self._win_len = np.array([p.window_len for p in self.plans], dtype=np.int64)
        self._half_periods = np.array(
            [p.half_periods for p in self.plans], dtype=np.int64
        )
        self._two_n = 2 * self._win_len
        self._m_left = self._half_periods - 1
        self._m_right = self._half_periods + 1
        # Parity of M' decides the sign relating a table entry to the
        # same entry half a table later; both sides share it.
        self._sigma = np.where(self._half_periods % 2 == 1, 1, -1).astype(np.int64)

        self._tables: dict[int, ReferenceTable] = {}
        base = np.zeros(n_bins, dtype=np.int64)
        offset = 0
        pieces_cos, pieces_sin = [], []
        for i, p in enumerate(self.plans):
            if p.window_len not in self._tables:
                table = ReferenceTable.for_window(p.window_len)
                self._tables[p.window_len] = (table, offset)
                pieces_cos.append(table.cos_values)
                pieces_sin.append(table.sin_values)
                offset += table.length
            base[i] = self._tables[p.window_len][1]
        self._base = base
        self._tab_cos = np.ascontiguousarray(np.concatenate(pieces_cos))
        self._tab_sin = np.ascontiguousarray(np.concatenate(pieces_sin))

        self._tau = np.array(
            [p.smoothing_time_constant for p in self.plans], dtype=np.float64
        )
        if calibrations is None:
            calibrations = [oracle.calibrate(p, self.sample_rate) for p in self.plans]
        self._calibration = np.asarray(calibrations, dtype=np.float64)
        if self._calibration.shape != (n_bins,):
            raise ValueError("need exactly one calibration constant per bin")

        self.buffer = SharedRingBuffer(int(self._win_len.max()) + _CHUNK)
        self._acc = np.zeros((n_bins, 4), dtype=np.int64)
        self._q_left = np.zeros(n_bins, dtype=np.int64)
        self._q_right = np.zeros(n_bins, dtype=np.int64)
        self._smoothed = np.zeros(n_bins, dtype=np.float64)
        self._total = 0
        self._smoothed_at = 0

    # ------------------------------------------------------------------
    # feeding

    @property
    def total_samples(self) -> int:
        return self._total

    @property
    def recommended_snapshot_interval(self) -> int:
        """Snapshot cadence in samples: half the shortest window."""
        return int(self._win_len.min()) // 2

    def process_sample(self, sample: int) -> None:
        """Push one 16-bit sample through every bin."""
        if not -32768 <= sample <= 32767:
            raise ValueError(f"sample {sample} outside 16-bit range")
        self.process_block(np.array([sample], dtype=np.int16))

    def process_block(self, samples) -> None:
        """Push a block of 16-bit samples; equivalent to one-at-a-time.

        Results depend only on the total sample sequence, never on how
        it is split into blocks.
        """
        arr = np.asarray(samples)
        if arr.dtype != np.int16:
            if not np.issubdtype(arr.dtype, np.integer):
                raise TypeError(
                    f"samples must be 16-bit integers, got dtype {arr.dtype}"
                )
            if arr.size and (arr.min() < -32768 or arr.max() > 32767):
                raise ValueError("sample values outside 16-bit range")
            arr = arr.astype(np.int16)
        for start in range(0, arr.shape[0], _CHUNK):
            chunk = np.ascontiguousarray(arr[start : start + _CHUNK])
            self.buffer.push_block(chunk)
            accumulate(
                chunk,
                self.buffer.data,
                np.int64(self.buffer.capacity),
                np.int64(self._total),
                self._win_len,
                self._two_n,
                self._base,
                self._m_left,
                self._m_right,
                self._q_left,
                self._q_right,
                self._sigma,
                self._acc,
                self._tab_cos,
                self._tab_sin,
            )
            self._total += chunk.shape[0]

    # ------------------------------------------------------------------
    # reading

    def rotated_accumulators(self) -> np.ndarray:
        """Accumulators with stream-time phase removed, (bins, 4) float.

        Columns are (re_left, im_left, re_right, im_right) in table-
        scaled units; divide by REF_SCALE for sample units.
        """
        th_l = np.pi * self._q_left / self._win_len
        th_r = np.pi * self._q_right / self._win_len
        out = np.empty((len(self.plans), 4))
        acc = self._acc.astype(np.float64)
        c, s = np.cos(th_l), np.sin(th_l)
        out[:, 0] = acc[:, 0] * c + acc[:, 1] * s
        out[:, 1] = acc[:, 1] * c - acc[:, 0] * s
        c, s = np.cos(th_r), np.sin(th_r)
        out[:, 2] = acc[:, 2] * c + acc[:, 3] * s
        out[:, 3] = acc[:, 3] * c - acc[:, 2] * s
        return out

    def _raw_magnitudes(self) -> np.ndarray:
        rot = self.rotated_accumulators()
        dot = rot[:, 0] * rot[:, 2] + rot[:, 1] * rot[:, 3]
        combined = np.maximum(0.0, -dot)
        return (
            self._calibration
            * np.sqrt(combined)
            / (self._win_len * REF_SCALE * FULL_SCALE)
        )

    def _apply_smoothing(self, raw: np.ndarray, elapsed_samples: int) -> None:
        dt = elapsed_samples / self.sample_rate
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha = np.where(
                self._tau > 0.0, 1.0 - np.exp(-dt / self._tau), 1.0
            )
        if elapsed_samples == 0:
            alpha = np.where(self._tau > 0.0, 0.0, 1.0)
        self._smoothed += alpha * (raw - self._smoothed)

    def update_smoothing(self, elapsed_samples: int) -> None:
        """Feed current raw magnitudes into the per-bin output filters.

        elapsed_samples is the stream time since the previous feed; the
        filter constant adapts so the smoothing behaves the same under
        any cadence.
        """
        self._apply_smoothing(self._raw_magnitudes(), elapsed_samples)
        self._smoothed_at = self._total

    def snapshot(self) -> SpectrumFrame:
        """Read the spectrum without disturbing the analysis state.

        Feeds the smoothing filters with the stream time elapsed since
        they were last fed; accumulators and phases are untouched.
        """
        raw = self._raw_magnitudes()
        self._apply_smoothing(raw, self._total - self._smoothed_at)
        self._smoothed_at = self._total
        return SpectrumFrame(
            sample_position=self._total,
            magnitudes=self._smoothed.copy(),
            raw_magnitudes=raw,
        )

    def bin_state(self, i: int) -> NcBinState:
        """Copy of bin i's live state, mainly for tests and debugging."""
        plan = self.plans[i]
        return NcBinState(
            plan=plan,
            ref=self._tables[plan.window_len][0],
            accumulators=tuple(int(v) for v in self._acc[i]),
            phase_index_l=int(self._q_left[i]),
            phase_index_r=int(self._q_right[i]),
            smoothed_output=float(self._smoothed[i]),
        )

    def reset(self) -> None:
        """Forget all signal state; plans and calibration survive."""
        self._acc[:] = 0
        self._q_left[:] = 0
        self._q_right[:] = 0
        self._smoothed[:] = 0.0
        self._total = 0
        self._smoothed_at = 0
        self.buffer.clear()
