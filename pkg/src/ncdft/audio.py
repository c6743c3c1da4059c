"""WAV input, streaming analysis, and spectrogram output.

The WAV reader is deliberately narrow: uncompressed 16-bit PCM, mono or
stereo, because that is the only thing the integer engine eats.  Parse
failures say which chunk was at fault rather than just "bad file".
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import NcEngine, SpectrumFrame
from .scale import NoteScaleConfig, plan_bank

__all__ = [
    "PcmStream",
    "Spectrogram",
    "read_wav",
    "stream_analyze",
    "render_csv",
    "render_pgm",
    "write_csv",
    "write_pgm",
]


@dataclass(frozen=True)
class PcmStream:
    """Decoded 16-bit PCM audio, channel-interleaved."""

    sample_rate: int
    channels: int
    samples: np.ndarray  # int16, len divisible by channels

    def __post_init__(self):
        if self.channels not in (1, 2):
            raise ValueError(f"channels must be 1 or 2, got {self.channels}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.shape[0] % self.channels:
            raise ValueError(
                f"{self.samples.shape[0]} samples do not divide into "
                f"{self.channels} channels"
            )

    @property
    def frame_count(self) -> int:
        return self.samples.shape[0] // self.channels

    @property
    def duration(self) -> float:
        return self.frame_count / self.sample_rate


def read_wav(path) -> PcmStream:
    """Parse a RIFF/WAVE file containing 16-bit PCM."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF":
        raise ValueError(f"{path}: missing RIFF signature")
    if raw[8:12] != b"WAVE":
        raise ValueError(f"{path}: RIFF form type is not WAVE")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        size = int.from_bytes(raw[pos + 4 : pos + 8], "little")
        body = raw[pos + 8 : pos + 8 + size]
        name = chunk_id.decode("ascii", "replace").strip()
        if len(body) < size:
            raise ValueError(
                f"{path}: '{name}' chunk claims {size} bytes but only "
                f"{len(body)} are present"
            )
        if chunk_id == b"fmt ":
            if size < 16:
                raise ValueError(f"{path}: 'fmt ' chunk too short ({size} bytes)")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise ValueError(f"{path}: no 'fmt ' chunk")
    if data is None:
        raise ValueError(f"{path}: no 'data' chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise ValueError(
            f"{path}: 'fmt ' chunk has format code {audio_format}; only "
            f"uncompressed PCM (1) is supported"
        )
    if bits != 16:
        raise ValueError(
            f"{path}: 'fmt ' chunk declares {bits}-bit samples; only 16-bit "
            f"is supported"
        )
    if channels not in (1, 2):
        raise ValueError(
            f"{path}: 'fmt ' chunk declares {channels} channels; only mono "
            f"and stereo are supported"
        )
    if len(data) % 2:
        raise ValueError(f"{path}: 'data' chunk has an odd byte count")
    samples = np.frombuffer(data, dtype="<i2").astype(np.int16)
    if samples.shape[0] % channels:
        raise ValueError(
            f"{path}: 'data' chunk sample count {samples.shape[0]} does not "
            f"divide into {channels} channels"
        )
    return PcmStream(sample_rate=sample_rate, channels=channels, samples=samples)


def downmix(stream: PcmStream) -> np.ndarray:
    """Mono int16 view of a stream; stereo averages with ties away from 0."""
    if stream.channels == 1:
        return stream.samples
    pairs = stream.samples.reshape(-1, 2).astype(np.int32)
    s = pairs[:, 0] + pairs[:, 1]
    return np.where(s >= 0, (s + 1) // 2, -((1 - s) // 2)).astype(np.int16)


@dataclass(frozen=True)
class Spectrogram:
    """Sequence of spectral frames on a fixed cadence."""

    frames: list
    frame_interval: float  # seconds between emitted frames
    bin_labels: list       # center frequency per column, Hz
    sample_rate: float


def stream_analyze(
    stream: PcmStream,
    config: NoteScaleConfig = NoteScaleConfig(),
    frame_rate: float = 60.0,
    packet_samples: int | None = None,
    engine: NcEngine | None = None,
) -> Spectrogram:
    """Run a PCM stream through an engine and collect spectral frames.

    The stream is fed in fixed packets (default: 10 ms worth) to mirror
    live capture, but results are independent of the packet size.  The
    engine is snapshotted on its recommended cadence or the frame
    cadence, whichever is faster, and frames are decimated to roughly
    frame_rate for output.  Passing an engine continues analysis on its
    existing state; its snapshot grid stays anchored to engine time.
    """
    if stream.sample_rate != config.sample_rate:
        raise ValueError(
            f"stream at {stream.sample_rate} Hz does not match the configured "
            f"rate {config.sample_rate:g} Hz; resampling is not supported"
        )
    if frame_rate <= 0:
        raise ValueError(f"frame_rate must be positive, got {frame_rate}")
    if engine is None:
        engine = NcEngine(plan_bank(config), config.sample_rate)
    mono = downmix(stream)
    if packet_samples is None:
        packet_samples = max(1, round(config.sample_rate / 100.0))

    h_out = max(1, round(config.sample_rate / frame_rate))
    h = max(1, min(engine.recommended_snapshot_interval, h_out))
    decimation = max(1, h_out // h)

    frames: list[SpectrumFrame] = []
    n = mono.shape[0]
    pos = 0
    while pos < n:
        packet = mono[pos : pos + packet_samples]
        fed = 0
        while fed < packet.shape[0]:
            t = engine.total_samples
            next_snap = (t // h + 1) * h
            sub = min(packet.shape[0] - fed, next_snap - t)
            engine.process_block(packet[fed : fed + sub])
            fed += sub
            if engine.total_samples == next_snap:
                frame = engine.snapshot()
                if (engine.total_samples // h) % decimation == 0:
                    frames.append(frame)
        pos += packet.shape[0]

    return Spectrogram(
        frames=frames,
        frame_interval=decimation * h / config.sample_rate,
        bin_labels=[p.f_center for p in engine.plans],
        sample_rate=config.sample_rate,
    )


def render_csv(spectrogram: Spectrogram) -> str:
    """Frames as CSV text: time_s column plus one column per bin."""
    if not spectrogram.frames:
        raise ValueError("spectrogram has no frames to write")
    lines = ["time_s," + ",".join(f"{f:.3f}" for f in spectrogram.bin_labels)]
    for frame in spectrogram.frames:
        t = frame.sample_position / spectrogram.sample_rate
        lines.append(
            f"{t:.6f}," + ",".join(f"{m:.12f}" for m in frame.magnitudes)
        )
    return "\n".join(lines) + "\n"


def render_pgm(spectrogram: Spectrogram) -> bytes:
    """Frames as a binary (P5) PGM image.

    Columns advance in time left to right; row 0 is the highest bin.
    Pixels map 60 dB below the spectrogram-wide peak onto 0..255; an
    all-zero spectrogram comes out all black.
    """
    if not spectrogram.frames:
        raise ValueError("spectrogram has no frames to write")
    mags = np.stack([f.magnitudes for f in spectrogram.frames])  # (frames, bins)
    peak = float(mags.max())
    if peak > 0.0:
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mags / peak)
        pixels = np.clip(np.rint(255.0 * (1.0 + db / 60.0)), 0.0, 255.0)
    else:
        pixels = np.zeros_like(mags)
    image = pixels.astype(np.uint8).T[::-1]  # rows high-to-low frequency
    height, width = image.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + image.tobytes()


def write_csv(spectrogram: Spectrogram, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(render_csv(spectrogram))


def write_pgm(spectrogram: Spectrogram, path) -> None:
    with open(path, "wb") as fh:
        fh.write(render_pgm(spectrogram))
