"""End-to-end acceptance checks for the whole analysis stack.

Each test measures one advertised property of the default 192-bin bank
and prints a single PASS/FAIL line with the numbers it saw, so a bare
`pytest tests/test_acceptance.py -v -s` doubles as a capability report.
"""

import time

import numpy as np
import pytest

from ncdft import (
    FULL_SCALE,
    NcEngine,
    PcmStream,
    classical_dft_window,
    mixed_tones,
    pink_noise,
    read_wav,
    render_csv,
    stream_analyze,
    tone,
)
from ncdft.engine import REF_SCALE
from ncdft.oracle import (
    _steady_window,
    direct_bin_sum,
    nc_window_response,
    sweep_response,
)


def _report(label, ok, detail):
    print(("PASS " if ok else "FAIL ") + label + ": " + detail)
    assert ok, label + ": " + detail


@pytest.fixture(scope="module")
def a4_curves(plans, config):
    """Fine linear sweeps of the A4 bin, shared by two tests below."""
    p = plans[96]
    w = config.sample_rate / p.window_len
    lo = p.f_center_quantized - 1.5 * w
    hi = p.f_center_quantized + 1.5 * w
    nc = sweep_response(p, config.sample_rate, lo, hi, steps=1000, mode="engine")
    rect = sweep_response(
        p, config.sample_rate, lo, hi, mode="rectangular",
        frequencies=nc.frequencies,
    )
    return p, nc, rect


def test_nc_support_is_half_the_classical_main_lobe(a4_curves, config):
    p, nc, rect = a4_curves
    w = config.sample_rate / p.window_len
    step = nc.frequencies[1] - nc.frequencies[0]

    nc_width = nc.measured_support_width

    rel = rect.relative_magnitudes
    peak = int(np.argmax(rel))
    lo = peak
    while lo > 0 and rel[lo - 1] < rel[lo]:
        lo -= 1
    hi = peak
    while hi < rel.shape[0] - 1 and rel[hi + 1] < rel[hi]:
        hi += 1
    rect_width = float(rect.frequencies[hi] - rect.frequencies[lo])

    ok = abs(nc_width - w) <= 2 * step and abs(rect_width - 2 * w) <= 2 * step
    _report(
        "bandwidth-halving",
        ok,
        f"NC support {nc_width:.3f} Hz vs F_S/N {w:.3f} "
        f"({(nc_width - w) / step:+.1f} steps); classical main lobe "
        f"{rect_width:.3f} Hz vs 2 F_S/N {2 * w:.3f} "
        f"({(rect_width - 2 * w) / step:+.1f} steps)",
    )


def test_response_outside_the_support_is_negligible(a4_curves, plans, config):
    p, nc, rect = a4_curves
    w = config.sample_rate / p.window_len
    fq = p.f_center_quantized
    floor = 10 ** (-50 / 20)

    # near field from the dense linear sweep, far field over +-4 octaves
    near = nc.max_out_of_band
    freqs = fq * np.logspace(-4, 4, 1000, base=2.0)
    wide = sweep_response(
        p, config.sample_rate, 0, 0, mode="engine", frequencies=freqs
    )
    outside = (freqs < p.f_left - w / 2) | (freqs > p.f_right + w / 2)
    far = float(wide.relative_magnitudes[outside].max())

    # classical baseline keeps its first sidelobe at about -13 dB
    rfreq, rrel = rect.frequencies, rect.relative_magnitudes
    right = rrel[(rfreq > fq + 1.05 * w) & (rfreq < fq + 1.95 * w)].max()
    left = rrel[(rfreq < fq - 1.05 * w) & (rfreq > fq - 1.95 * w)].max()
    side_db = 20 * np.log10(max(left, right))

    worst = max(near, far)
    worst_db = 20 * np.log10(worst) if worst > 0 else float("-inf")
    ok = worst <= floor and -14.0 <= side_db <= -12.0
    _report(
        "sidelobe-elimination",
        ok,
        f"NC out-of-band max {worst_db:.1f} dB (limit -50); classical "
        f"first sidelobe {side_db:.2f} dB (expected -13 +- 1)",
    )


def test_random_input_followed_by_silence_nets_zero(bank_engine):
    rng = np.random.default_rng(3)
    flush = np.zeros(6000, dtype=np.int16)
    clean = True
    for _ in range(100):
        n = int(rng.integers(500, 3000))
        bank_engine.process_block(
            rng.integers(-32768, 32768, size=n).astype(np.int16)
        )
        bank_engine.process_block(flush)
        clean = clean and bool((bank_engine._acc == 0).all())
    _report(
        "integer-stability",
        clean,
        "100 random streams, every accumulator of all 192 bins exactly 0 "
        "after a max-window flush",
    )


def test_engine_matches_the_float_oracle(config, plans, calibrations):
    rng = np.random.default_rng(4)
    eng = NcEngine(plans, config.sample_rate, calibrations=calibrations)
    worst = 0.0
    for _ in range(20):
        sig = rng.integers(-32768, 32768, size=12000).astype(np.int16)
        eng.reset()
        eng.process_block(sig)
        rot = eng.rotated_accumulators()
        for i, p in enumerate(plans):
            win = sig[-p.window_len:]
            sign = 1.0 if p.half_periods % 2 else -1.0
            rl, il = direct_bin_sum(win, p.f_left, config.sample_rate)
            rr, ir = direct_bin_sum(win, p.f_right, config.sample_rate)
            expect = sign * REF_SCALE * np.array([rl, il, rr, ir])
            rel = np.linalg.norm(rot[i] - expect) / np.linalg.norm(expect)
            worst = max(worst, rel)
    ok = worst <= 1e-3
    _report(
        "oracle-equivalence",
        ok,
        f"20 random double-max-window streams, all 192 bins: worst "
        f"accumulator deviation {worst:.2e} (limit 1e-3)",
    )


def test_default_bank_planning_numbers(plans, config):
    n_bins = len(plans)
    first = plans[0].f_center
    last = plans[-1].f_center
    eq2 = classical_dft_window(29.14 - 27.5, config.sample_rate)
    top_octave = plans[-config.bins_per_octave:]
    shortest = min(p.window_len for p in top_octave) / config.sample_rate
    # 2.6 ms is quoted to one decimal; allow that quantum plus one sample
    duration_ok = abs(shortest - 0.0026) <= 0.00005 + 1.0 / config.sample_rate
    ok = (
        n_bins == 192
        and abs(first - 27.5) <= 0.1
        and abs(last - 6839.6) <= 0.1
        and abs(eq2 - 14634) <= 1
        and duration_ok
    )
    _report(
        "bank-planning",
        ok,
        f"{n_bins} bins {first:.1f}..{last:.1f} Hz; A0 spacing needs "
        f"{eq2} samples (14634 +- 1); shortest top-octave window "
        f"{shortest * 1000:.4f} ms (about 2.6)",
    )


def test_throughput_and_scaling(config, plans, calibrations):
    noise = pink_noise(48000, seed=0)

    def cost(bank, cal):
        eng = NcEngine(bank, config.sample_rate, calibrations=cal)
        eng.process_block(noise[:4096])  # absorb one-time compile cost
        best = float("inf")
        for _ in range(3):
            eng.reset()
            t0 = time.perf_counter()
            eng.process_block(noise)
            best = min(best, time.perf_counter() - t0)
        return 1e6 * best / noise.shape[0]

    full = cost(plans, calibrations)
    half = cost(plans[:96], calibrations[:96])
    ok = full <= 2.0 and full / half <= 2.5
    _report(
        "throughput",
        ok,
        f"192 bins: {full:.3f} us/sample (limit 2.0); 96 bins: "
        f"{half:.3f}; scaling x{full / half:.2f} (limit 2.5)",
    )


def test_results_do_not_depend_on_packet_size(tmp_path, config, plans,
                                              calibrations):
    import struct

    data = pink_noise(24000, seed=9).tobytes()
    fmt = struct.pack("<HHIIHH", 1, 1, 48000, 96000, 2, 16)
    body = (b"fmt " + struct.pack("<I", 16) + fmt
            + b"data" + struct.pack("<I", len(data)) + data)
    wav = tmp_path / "noise.wav"
    wav.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)
    stream = read_wav(wav)
    mono = stream.samples

    # accumulator trajectories sampled on the common packet grid
    trajectories = []
    for packet in (480, 1, 4800):
        eng = NcEngine(plans, config.sample_rate, calibrations=calibrations)
        checkpoints = []
        for pos in range(0, mono.shape[0], packet):
            eng.process_block(mono[pos:pos + packet])
            if eng.total_samples % 4800 == 0:
                checkpoints.append(eng._acc.copy())
        trajectories.append(checkpoints)
    acc_identical = all(
        len(t) == len(trajectories[0])
        and all(np.array_equal(a, b) for a, b in zip(t, trajectories[0]))
        for t in trajectories[1:]
    )

    csvs = [
        render_csv(stream_analyze(stream, config, packet_samples=packet))
        for packet in (480, 1, 4800)
    ]
    csv_identical = csvs[0] == csvs[1] == csvs[2]

    ok = acc_identical and csv_identical
    _report(
        "packet-invariance",
        ok,
        f"packets of 480/1/4800 samples: {len(trajectories[0])} accumulator "
        f"checkpoints bit-identical ({acc_identical}), CSV output identical "
        f"({csv_identical})",
    )


def test_note_grid_tones_are_heard_uniformly(plans, config, calibrations):
    # independent float path: response of every nearby bin to a tone at
    # each interior grid frequency, best bin vs the octave's best case
    fs = config.sample_rate
    interior = range(1, len(plans) - 1)
    best = np.zeros(len(plans))
    for i in interior:
        sig = tone(plans[i].f_center, 2 * 6000, fs)
        responses = []
        for j in range(max(0, i - 6), min(len(plans), i + 7)):
            q = plans[j]
            window = _steady_window(sig[: 2 * q.window_len], q.window_len)
            combined = nc_window_response(window, q, fs)
            responses.append(
                calibrations[j] * np.sqrt(combined)
                / (q.window_len * FULL_SCALE)
            )
        best[i] = max(responses)
    bpo = config.bins_per_octave
    octave_peak = {}
    for i in interior:
        octave_peak[i // bpo] = max(octave_peak.get(i // bpo, 0.0), best[i])
    ratios = np.array([best[i] / octave_peak[i // bpo] for i in interior])
    worst = float(ratios.min())
    worst_bin = list(interior)[int(np.argmin(ratios))]
    ok = worst >= 10 ** (-3 / 20)
    _report(
        "coverage-uniformity",
        ok,
        f"worst interior grid tone sits {20 * np.log10(worst):.2f} dB under "
        f"its octave's best (limit -3), at bin {worst_bin} "
        f"({plans[worst_bin].f_center:.1f} Hz)",
    )


def test_two_tones_an_octave_apart_stay_separate(config, plans, calibrations):
    eng = NcEngine(plans, config.sample_rate, calibrations=calibrations)
    eng.process_block(
        mixed_tones([440.0, 880.0], [16383, 16383], 12000, config.sample_rate)
    )
    raw = eng.snapshot().raw_magnitudes
    db = 20 * np.log10(np.maximum(raw, 1e-300))
    above = sorted(int(i) for i in np.where(db > -20.0)[0])
    grid_a4 = 96
    grid_a5 = 120
    ok = (
        len(above) == 2
        and abs(above[0] - grid_a4) <= 1
        and abs(above[1] - grid_a5) <= 1
    )
    runner_up = float(np.sort(db)[-3])
    _report(
        "two-tone-separation",
        ok,
        f"bins above -20 dB: {above} at "
        f"{[f'{db[i]:.2f}' for i in above]} dB (expected the 440 and 880 Hz "
        f"bins); loudest other bin {runner_up:.2f} dB",
    )
