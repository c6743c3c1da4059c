"""Brute-force floating-point references for tests and calibration.

Everything here recomputes analysis results the slow, obvious way:
explicit windowed sums against freshly generated cosine and sine
vectors.  None of the integer engine's tables or bookkeeping is reused,
so agreement between the two paths is meaningful evidence.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .scale import BinPlan
from .signals import FULL_SCALE, tone

__all__ = [
    "ResponseCurve",
    "direct_bin_sum",
    "nc_window_response",
    "calibrate",
    "sweep_response",
]

# A sweep point counts as part of a lobe while it stays above this level
# relative to the lobe peak.  Quantization noise sits far below it.
SUPPORT_THRESHOLD_DB = -50.0


def direct_bin_sum(samples, frequency, sample_rate, phase_origin=0):
    """Plain correlation of a sample block against one analysis frequency.

    Returns (re, im) where re = sum s[n] cos(2 pi f (n + phase_origin) / fs)
    and im is the sine counterpart.  phase_origin shifts the reference,
    letting a caller anchor it to stream time rather than window time.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = np.arange(samples.shape[0], dtype=np.float64) + phase_origin
    angles = 2.0 * np.pi * frequency * n / sample_rate
    return float(samples @ np.cos(angles)), float(samples @ np.sin(angles))


def nc_window_response(window_samples, plan: BinPlan, sample_rate) -> float:
    """NC combination of one window, window-anchored phase.

    Correlates the window against the plan's left and right reference
    frequencies and combines them as max(0, -(reL reR + imL imR)).
    """
    re_l, im_l = direct_bin_sum(window_samples, plan.f_left, sample_rate)
    re_r, im_r = direct_bin_sum(window_samples, plan.f_right, sample_rate)
    return max(0.0, -(re_l * re_r + im_l * im_r))


def _steady_window(samples, window_len):
    # Measurement convention shared by calibrate and the sweeps: run for
    # two windows and analyse the second, discarding the fill transient.
    return samples[window_len : 2 * window_len]


def calibrate(plan: BinPlan, sample_rate) -> float:
    """Magnitude scale factor for one bin, from a full-scale center tone.

    Drives a quantized full-scale sine at the bin's quantized center
    through the float path and returns the constant that makes the
    reported magnitude exactly 1.0.  Comes out near pi: each component
    bin sees the tone half a bin off-center, where the rectangular
    window's kernel has fallen to about 2N/pi of its peak.
    """
    n = plan.window_len
    samples = tone(plan.f_center_quantized, 2 * n, sample_rate)
    combined = nc_window_response(_steady_window(samples, n), plan, sample_rate)
    if combined <= 0.0:
        raise ValueError(
            f"bin {plan.index}: calibration tone produced no NC response"
        )
    return n * FULL_SCALE / np.sqrt(combined)


@dataclass
class ResponseCurve:
    """Swept single-bin response, normalised to its own peak."""

    frequencies: np.ndarray
    relative_magnitudes: np.ndarray
    measured_support_width: float  # Hz, contiguous span above threshold
    max_out_of_band: float         # largest relative magnitude off-band

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("frequency_hz,relative_magnitude\n")
        for f, m in zip(self.frequencies, self.relative_magnitudes):
            buf.write(f"{f:.6f},{m:.9e}\n")
        return buf.getvalue()


def _support_width(frequencies, relative, threshold=None) -> float:
    if threshold is None:
        threshold = 10.0 ** (SUPPORT_THRESHOLD_DB / 20.0)
    peak = int(np.argmax(relative))
    lo = peak
    while lo > 0 and relative[lo - 1] > threshold:
        lo -= 1
    hi = peak
    while hi < relative.shape[0] - 1 and relative[hi + 1] > threshold:
        hi += 1
    # Count-based width: each sweep point claims one step, which keeps
    # the estimate centered rather than biased half a step low per edge.
    if frequencies.shape[0] > 1:
        step = float(np.median(np.diff(frequencies)))
    else:
        step = 0.0
    return float(frequencies[hi] - frequencies[lo]) + step


def sweep_response(
    plan: BinPlan,
    sample_rate,
    f_lo,
    f_hi,
    steps=1000,
    mode="engine",
    frequencies=None,
) -> ResponseCurve:
    """Measure a bin's steady response to tones swept across [f_lo, f_hi].

    Each tone is full scale, quantized, and sustained for two windows;
    the second window is measured.  mode selects the integer engine
    ("engine"), this module's float path ("oracle"), or a rectangular
    single-bin DFT magnitude at the center frequency ("rectangular") as
    the classical baseline.  An explicit frequency grid overrides
    f_lo/f_hi/steps.
    """
    if frequencies is None:
        frequencies = np.linspace(f_lo, f_hi, steps)
    else:
        frequencies = np.asarray(frequencies, dtype=np.float64)
    n = plan.window_len
    realised_bw = sample_rate / n

    if mode == "engine":
        from .engine import NcEngine

        eng = NcEngine([plan], sample_rate)
        magnitudes = np.empty(frequencies.shape[0])
        for i, f in enumerate(frequencies):
            eng.reset()
            eng.process_block(tone(f, 2 * n, sample_rate))
            magnitudes[i] = eng.snapshot().raw_magnitudes[0]
    elif mode == "oracle":
        magnitudes = np.empty(frequencies.shape[0])
        for i, f in enumerate(frequencies):
            window = _steady_window(tone(f, 2 * n, sample_rate), n)
            magnitudes[i] = np.sqrt(nc_window_response(window, plan, sample_rate))
    elif mode == "rectangular":
        magnitudes = np.empty(frequencies.shape[0])
        for i, f in enumerate(frequencies):
            window = _steady_window(tone(f, 2 * n, sample_rate), n)
            re, im = direct_bin_sum(window, plan.f_center_quantized, sample_rate)
            magnitudes[i] = np.hypot(re, im)
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")

    peak = float(np.max(magnitudes))
    relative = magnitudes / peak if peak > 0 else magnitudes
    out_lo = plan.f_left - realised_bw / 2.0
    out_hi = plan.f_right + realised_bw / 2.0
    outside = (frequencies < out_lo) | (frequencies > out_hi)
    max_oob = float(np.max(relative[outside])) if np.any(outside) else 0.0
    return ResponseCurve(
        frequencies=frequencies,
        relative_magnitudes=relative,
        measured_support_width=_support_width(frequencies, relative),
        max_out_of_band=max_oob,
    )
