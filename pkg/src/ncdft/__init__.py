"""Note-aligned streaming spectral analysis with NC sliding-DFT bins."""

from .scale import (
    NoteScaleConfig,
    BinPlan,
    note_frequency,
    classical_dft_window,
    window_size,
    plan_bank,
)
from .ring import SharedRingBuffer
from .engine import (
    REF_SCALE,
    ReferenceTable,
    NcBinState,
    SpectrumFrame,
    NcEngine,
    rotate_accumulators,
    nc_combine,
)
from .oracle import ResponseCurve, direct_bin_sum, calibrate, sweep_response
from .signals import FULL_SCALE, tone, mixed_tones, pink_noise
from .audio import (
    PcmStream,
    Spectrogram,
    read_wav,
    stream_analyze,
    render_csv,
    render_pgm,
    write_csv,
    write_pgm,
)

__version__ = "0.1.0"

__all__ = [
    "NoteScaleConfig",
    "BinPlan",
    "note_frequency",
    "classical_dft_window",
    "window_size",
    "plan_bank",
    "SharedRingBuffer",
    "REF_SCALE",
    "ReferenceTable",
    "NcBinState",
    "SpectrumFrame",
    "NcEngine",
    "rotate_accumulators",
    "nc_combine",
    "ResponseCurve",
    "direct_bin_sum",
    "calibrate",
    "sweep_response",
    "FULL_SCALE",
    "tone",
    "mixed_tones",
    "pink_noise",
    "PcmStream",
    "Spectrogram",
    "read_wav",
    "stream_analyze",
    "render_csv",
    "render_pgm",
    "write_csv",
    "write_pgm",
]
