"""Command-line frontend: analyze, sweep, bench, plan.

All four subcommands share the bank-shape flags, so a bank tuned on
`plan` can be fed verbatim to the others.  `plan` and `sweep` print
deterministic tables for a given flag set; `bench` times the engine on
synthetic pink noise.
"""

from __future__ import annotations

import argparse
import sys
import time

from .audio import read_wav, render_csv, render_pgm, stream_analyze
from .engine import NcEngine
from .oracle import sweep_response
from .scale import NoteScaleConfig, plan_bank
from .signals import pink_noise

__all__ = ["run", "main"]


def _add_bank_flags(parser):
    parser.add_argument("--sample-rate", type=float, default=48000.0,
                        metavar="HZ", help="PCM sample rate (default 48000)")
    parser.add_argument("--bins-per-octave", type=int, default=24,
                        help="bins per octave (default 24)")
    parser.add_argument("--octaves", type=int, default=8,
                        help="octaves covered (default 8)")
    parser.add_argument("--start-note", type=int, default=21, metavar="MIDI",
                        help="MIDI note of the lowest bin (default 21 = A0)")
    parser.add_argument("--max-window", type=float, default=0.125,
                        metavar="SECONDS",
                        help="window length cap in seconds (default 0.125)")


def _bank_config(args) -> NoteScaleConfig:
    return NoteScaleConfig(
        sample_rate=args.sample_rate,
        bins_per_octave=args.bins_per_octave,
        octaves=args.octaves,
        lowest_note_midi=args.start_note,
        max_window_seconds=args.max_window,
    )


def _cmd_plan(args) -> int:
    config = _bank_config(args)
    plans = plan_bank(config)
    print("index f_center f_quantized window_len half_periods"
          " f_left f_right w_nc variable_q")
    for p in plans:
        w_nc = config.sample_rate / p.window_len
        print(f"{p.index:5d} {p.f_center:10.4f} {p.f_center_quantized:11.4f}"
              f" {p.window_len:6d} {p.half_periods:4d} {p.f_left:10.4f}"
              f" {p.f_right:10.4f} {w_nc:9.4f} {int(p.is_variable_q)}")
    return 0


def _cmd_analyze(args) -> int:
    config = _bank_config(args)
    stream = read_wav(args.input)
    spectrogram = stream_analyze(stream, config, frame_rate=args.frame_rate)
    if args.format == "csv":
        text = render_csv(spectrogram)
        if args.out:
            with open(args.out, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        blob = render_pgm(spectrogram)
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(blob)
        else:
            sys.stdout.buffer.write(blob)
    return 0


def _cmd_sweep(args) -> int:
    config = _bank_config(args)
    plans = plan_bank(config)
    if not 0 <= args.bin_index < len(plans):
        raise ValueError(
            f"--bin-index {args.bin_index} out of range 0..{len(plans) - 1}"
        )
    plan = plans[args.bin_index]
    bandwidth = config.sample_rate / plan.window_len
    span = args.span if args.span is not None else 3.0 * bandwidth
    f_lo = plan.f_center_quantized - span / 2.0
    f_hi = plan.f_center_quantized + span / 2.0
    if f_lo <= 0.0 or f_hi >= config.sample_rate / 2.0:
        raise ValueError(
            f"sweep span {span:g} Hz around {plan.f_center_quantized:.4f} Hz "
            f"leaves (0, Nyquist)"
        )
    curve = sweep_response(plan, config.sample_rate, f_lo, f_hi,
                           steps=args.steps, mode="engine")
    if args.baseline == "rectangular":
        base = sweep_response(plan, config.sample_rate, f_lo, f_hi,
                              mode="rectangular",
                              frequencies=curve.frequencies)
        print("frequency_hz,relative_magnitude,baseline_relative")
        for f, m, b in zip(curve.frequencies, curve.relative_magnitudes,
                           base.relative_magnitudes):
            print(f"{f:.6f},{m:.9e},{b:.9e}")
    else:
        sys.stdout.write(curve.to_csv())
    print(f"bin {plan.index}: support width {curve.measured_support_width:.4f} Hz,"
          f" bin bandwidth {bandwidth:.4f} Hz,"
          f" max out-of-band {curve.max_out_of_band:.3e}",
          file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    config = _bank_config(args)
    plans = plan_bank(config)
    if args.bins is not None:
        if not 1 <= args.bins <= len(plans):
            raise ValueError(
                f"--bins {args.bins} out of range 1..{len(plans)}"
            )
        plans = plans[: args.bins]
    engine = NcEngine(plans, config.sample_rate)
    n = max(1, round(args.seconds * config.sample_rate))
    noise = pink_noise(n, seed=0)
    engine.process_block(noise[:4096])  # warm the compiled kernel
    engine.reset()
    t0 = time.perf_counter()
    engine.process_block(noise)
    elapsed = time.perf_counter() - t0
    rate = n / elapsed
    print(f"{len(plans)} bins, {n} samples in {elapsed:.3f} s: "
          f"{rate:.0f} samples/s, {1e6 * elapsed / n:.3f} us/sample")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncdft",
        description="Note-aligned streaming spectral analysis.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", help="analyze a WAV file to CSV or PGM")
    _add_bank_flags(p)
    p.add_argument("input", help="WAV file (16-bit PCM, mono or stereo)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("--frame-rate", type=float, default=60.0,
                   help="output frames per second (default 60)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("sweep", help="measure one bin's frequency response")
    _add_bank_flags(p)
    p.add_argument("--bin-index", type=int, required=True)
    p.add_argument("--span", type=float, default=None, metavar="HZ",
                   help="swept span centered on the bin (default 3 bandwidths)")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--baseline", choices=("rectangular", "none"),
                   default="none",
                   help="add a plain windowless-DFT magnitude column")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bench", help="time the engine on synthetic noise")
    _add_bank_flags(p)
    p.add_argument("--seconds", type=float, default=10.0,
                   help="synthetic input duration (default 10)")
    p.add_argument("--bins", type=int, default=None,
                   help="use only the first N bins of the bank")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("plan", help="print the bin table for a bank")
    _add_bank_flags(p)
    p.set_defaults(func=_cmd_plan)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
