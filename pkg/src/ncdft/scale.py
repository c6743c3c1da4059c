"""Bin planning for note-aligned spectral analysis.

Maps an equal-tempered note grid onto a bank of neighbour-component (NC)
bins: each bin gets a target bandwidth from its grid spacing, a window
length that realises that bandwidth, and a pair of reference frequencies
sitting exactly one DFT bin apart within that window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "NoteScaleConfig",
    "BinPlan",
    "note_frequency",
    "classical_dft_window",
    "window_size",
    "plan_bank",
]


def _round_half_up(x: float) -> int:
    # Deterministic rounding with ties away from zero (values here are
    # always positive).  Python's round() would tie to even instead.
    return int(math.floor(x + 0.5))


def note_frequency(midi_note: float, reference_pitch: float = 440.0) -> float:
    """Frequency in Hz of an equal-tempered MIDI note number.

    Fractional note numbers are allowed; the note grid of a bank with
    more than 12 bins per octave lives on fractional notes.
    """
    return reference_pitch * 2.0 ** ((midi_note - 69) / 12.0)


def classical_dft_window(delta_f: float, sample_rate: float) -> int:
    """Samples a plain DFT needs to separate two tones delta_f apart.

    This is the yardstick the NC scheme halves: a rectangular window
    resolves adjacent bins only once it spans sample_rate / (2 delta_f)
    samples.
    """
    if delta_f <= 0:
        raise ValueError(f"delta_f must be positive, got {delta_f}")
    return math.ceil(sample_rate / (2.0 * delta_f))


def window_size(f_center: float, target_bandwidth: float, sample_rate: float) -> int:
    """Window length whose bin spacing best matches target_bandwidth.

    Chooses the half-period count M = round(2 f_center / W) first, then
    the window N = round(M sample_rate / (2 f_center)) so that f_center
    lands as close as possible to an integer number of half-periods.
    The realised bandwidth sample_rate / N differs from the target by at
    most about one part in M.
    """
    if not 0 < target_bandwidth < f_center:
        raise ValueError(
            f"target_bandwidth must be in (0, f_center), got {target_bandwidth} "
            f"for f_center {f_center}"
        )
    if not f_center < sample_rate / 2:
        raise ValueError(
            f"f_center {f_center} is not below the Nyquist rate {sample_rate / 2}"
        )
    m = _round_half_up(2.0 * f_center / target_bandwidth)
    return _round_half_up(m * sample_rate / (2.0 * f_center))


@dataclass(frozen=True)
class NoteScaleConfig:
    """Parameters describing the note grid and analysis limits."""

    sample_rate: float = 48000.0
    bins_per_octave: int = 24
    octaves: int = 8
    lowest_note_midi: int = 21
    reference_pitch: float = 440.0
    max_window_seconds: float = 0.125

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.bins_per_octave < 1:
            raise ValueError(
                f"bins_per_octave must be at least 1, got {self.bins_per_octave}"
            )
        if self.octaves < 1:
            raise ValueError(f"octaves must be at least 1, got {self.octaves}")
        if self.reference_pitch <= 0:
            raise ValueError(
                f"reference_pitch must be positive, got {self.reference_pitch}"
            )
        if self.max_window_seconds <= 0:
            raise ValueError(
                f"max_window_seconds must be positive, got {self.max_window_seconds}"
            )
        top = self.grid_frequency(self.bin_count - 1)
        if not top < self.sample_rate / 2:
            raise ValueError(
                f"highest planned bin {top:.1f} Hz reaches the Nyquist rate "
                f"{self.sample_rate / 2:.1f} Hz"
            )

    @property
    def bin_count(self) -> int:
        return self.octaves * self.bins_per_octave

    def grid_frequency(self, i: int) -> float:
        """Center frequency of grid index i (i may sit outside the bank)."""
        note = self.lowest_note_midi + 12.0 * i / self.bins_per_octave
        return note_frequency(note, self.reference_pitch)


@dataclass(frozen=True)
class BinPlan:
    """Fully resolved analysis parameters for one NC bin."""

    index: int
    f_center: float            # ideal grid frequency, Hz
    target_bandwidth: float    # designed NC bandwidth, Hz
    window_len: int            # N, samples
    half_periods: int          # M, half-periods of f_center within the window
    f_center_quantized: float  # M * sample_rate / (2 N)
    f_left: float              # (M - 1) * sample_rate / (2 N)
    f_right: float             # (M + 1) * sample_rate / (2 N)
    is_variable_q: bool        # True when the window clamp widened the bin
    smoothing_time_constant: float  # seconds, for the output IIR stage


def plan_bank(config: NoteScaleConfig) -> list[BinPlan]:
    """Plan every bin of the bank described by config.

    Interior bins aim for the two-grid-step bandwidth f(i+1) - f(i-1);
    the first and last bin double their one-sided spacing instead.
    Window lengths are clamped to max_window_seconds; a clamped bin is
    marked variable-Q because its realised bandwidth is then wider than
    the grid asked for.
    """
    fs = config.sample_rate
    count = config.bin_count
    max_len = _round_half_up(config.max_window_seconds * fs)

    plans = []
    for i in range(count):
        fc = config.grid_frequency(i)
        if i == 0:
            bw = 2.0 * (config.grid_frequency(1) - fc)
        elif i == count - 1:
            bw = 2.0 * (fc - config.grid_frequency(i - 1))
        else:
            bw = config.grid_frequency(i + 1) - config.grid_frequency(i - 1)

        n = window_size(fc, bw, fs)
        clamped = n > max_len
        if clamped:
            n = max_len
        if n < 3:
            raise ValueError(
                f"bin {i} at {fc:.1f} Hz needs a window of {n} samples; "
                f"at least 3 are required"
            )
        m = _round_half_up(2.0 * fc * n / fs)
        if m < 5:
            raise ValueError(
                f"bin {i} at {fc:.1f} Hz fits only {m} half-periods in its "
                f"window; at least 5 are required for a usable NC pair"
            )
        step = fs / (2.0 * n)
        f_right = (m + 1) * fs / (2.0 * n)
        if not f_right < fs / 2:
            raise ValueError(
                f"bin {i}: upper reference {f_right:.1f} Hz reaches the "
                f"Nyquist rate {fs / 2:.1f} Hz"
            )
        fq = m * fs / (2.0 * n)
        if abs(fq - fc) > step:
            raise ValueError(
                f"bin {i}: quantized center {fq:.2f} Hz strayed more than "
                f"half a bin from {fc:.2f} Hz"
            )
        plans.append(
            BinPlan(
                index=i,
                f_center=fc,
                target_bandwidth=bw,
                window_len=n,
                half_periods=m,
                f_center_quantized=fq,
                f_left=(m - 1) * fs / (2.0 * n),
                f_right=f_right,
                is_variable_q=clamped,
                smoothing_time_constant=0.0,  # filled in below
            )
        )

    longest = max(p.window_len for p in plans) / fs
    return [
        replace(p, smoothing_time_constant=max(0.0, longest - p.window_len / fs) / 2.0)
        for p in plans
    ]
