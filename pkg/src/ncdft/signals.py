"""Deterministic test-signal synthesis.

Tones are generated in floating point and quantized to 16-bit without
dither; the quantization error is part of what the analysis tests are
meant to see.
"""

from __future__ import annotations

import numpy as np

FULL_SCALE = 32767

__all__ = ["FULL_SCALE", "tone", "mixed_tones", "pink_noise"]


def tone(frequency, n_samples, sample_rate, amplitude=FULL_SCALE, phase=0.0):
    """A quantized sine burst as int16 samples.

    The phase argument is the sine phase in radians at sample 0.
    """
    t = np.arange(n_samples, dtype=np.float64)
    x = amplitude * np.sin(2.0 * np.pi * frequency * t / sample_rate + phase)
    return np.rint(x).astype(np.int16)


def mixed_tones(frequencies, amplitudes, n_samples, sample_rate):
    """Sum of sine tones, quantized once at the end."""
    t = np.arange(n_samples, dtype=np.float64)
    x = np.zeros(n_samples, dtype=np.float64)
    for f, a in zip(frequencies, amplitudes):
        x += a * np.sin(2.0 * np.pi * f * t / sample_rate)
    peak = np.max(np.abs(x)) if n_samples else 0.0
    if peak > FULL_SCALE:
        raise ValueError(
            f"mixed tone peaks at {peak:.0f}, beyond full scale {FULL_SCALE}"
        )
    return np.rint(x).astype(np.int16)


def pink_noise(n_samples, seed=0, rms_fraction=0.125):
    """Pink (1/f power) noise as int16 samples, reproducible from seed.

    Shaped in the frequency domain: white Gaussian noise is scaled by
    1/sqrt(f) above DC and transformed back.  rms_fraction sets the RMS
    level relative to full scale; the default leaves generous headroom
    so the quantized peaks stay inside 16 bits.
    """
    if n_samples <= 0:
        return np.zeros(0, dtype=np.int16)
    rng = np.random.default_rng(seed)
    spectrum = rng.standard_normal(n_samples // 2 + 1) + 1j * rng.standard_normal(
        n_samples // 2 + 1
    )
    k = np.arange(spectrum.shape[0], dtype=np.float64)
    k[0] = 1.0
    spectrum /= np.sqrt(k)
    spectrum[0] = 0.0
    x = np.fft.irfft(spectrum, n=n_samples)
    rms = np.sqrt(np.mean(x * x))
    if rms == 0.0:  # nothing but the zeroed DC line survived
        return np.zeros(n_samples, dtype=np.int16)
    x *= rms_fraction * FULL_SCALE / rms
    np.clip(x, -FULL_SCALE, FULL_SCALE, out=x)
    return np.rint(x).astype(np.int16)
