"""Command-line entry point (``smiscaling``)."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import io
from .cycles import detect_cycles
from .detrended import ScaleGrid, ScalingFunction, dfa_fluctuation, dma_fluctuation
from .fitting import beta_to_alpha, detect_crossovers, fit_exponent
from .pipeline import RunConfig, default_fit_max, format_table, run_report
from .rolling import TdConfig, td_dma
from .series import ReturnSeries, log_returns
from .synth import SynthSpec, generate, to_prices
from .wavelet import (
    WaveletSpec,
    cwt,
    period_to_scale,
    rescale_scalegram,
    scalegram,
    wavelet_scales,
)

log = logging.getLogger("smiscaling")

EXIT_OK, EXIT_SERIES_FAILED, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", action="append", default=[], metavar="PATH",
                   help="input file (repeatable)")
    p.add_argument("--label", action="append", default=[],
                   help="label for the matching --input (defaults to the file stem)")
    p.add_argument("--out", default=None, metavar="DIR", help="output directory")
    p.add_argument("--fit-min", type=float, default=None, help="default 10")
    p.add_argument("--fit-max", type=float, default=None)
    p.add_argument("--grid-ppd", type=int, default=40, help="scale points per decade")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smiscaling",
        description="Scaling analysis of daily price series (DFA, cDMA, DOG wavelets, tdDMA).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("returns", help="write log-returns")
    _common(p)

    p = sub.add_parser("dfa", help="DFA fluctuation function")
    _common(p)
    p.add_argument("--dfa-order", type=int, default=2)

    p = sub.add_parser("dma", help="centered DMA fluctuation function")
    _common(p)

    p = sub.add_parser("wavelet", help="DOG scalegram and its rescaled form")
    _common(p)
    p.add_argument("--dog-order", type=int, default=1)
    p.add_argument("--voices", type=int, default=16, help="scales per octave")
    p.add_argument("--exclude-coi", action="store_true",
                   help="drop edge-affected translations from the scalegram")

    p = sub.add_parser("tddma", help="sliding-window local Hurst exponents")
    _common(p)
    p.add_argument("--window", type=int, default=1000)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--r2-floor", type=float, default=0.9)

    p = sub.add_parser("cycles", help="periodic-trend detection (high vs low DOG order)")
    _common(p)
    p.add_argument("--dog-order", type=int, default=10)
    p.add_argument("--voices", type=int, default=16)
    p.add_argument("--min-prominence", type=float, default=0.6)

    p = sub.add_parser("fit", help="fit a power law to scale,value files")
    _common(p)

    p = sub.add_parser("synth", help="write a synthetic date,close series")
    p.add_argument("--kind", choices=("white", "fgn", "sinusoid_plus_noise"), default="fgn")
    p.add_argument("--length", type=int, default=10000, help="number of returns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hurst", type=float, default=0.7)
    p.add_argument("--period", type=float, default=90.0)
    p.add_argument("--amplitude", type=float, default=2.0)
    p.add_argument("--label", default=None)
    p.add_argument("--out", default=None, metavar="DIR",
                   help="output directory (stdout when omitted)")

    p = sub.add_parser("report", help="full analysis with a summary table")
    _common(p)
    p.add_argument("--dfa-order", type=int, default=2)
    p.add_argument("--dog-order", type=int, default=10, help="high DOG order for cycles")
    p.add_argument("--window", type=int, default=1000)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--voices", type=int, default=16)
    return parser


def _inputs(args) -> list[tuple[str, str]]:
    if args.label and len(args.label) != len(args.input):
        raise ConfigError("--label must be given once per --input, or not at all")
    labels = args.label or [Path(p).stem for p in args.input]
    if len(set(labels)) != len(labels):
        raise ConfigError("labels must be unique")
    return list(zip(args.input, labels))


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _returns(path: str, label: str) -> ReturnSeries:
    return ReturnSeries(log_returns(io.read_prices(path, label)).values, label)


def _fit_line(label: str, kind: str, sf: ScalingFunction, lo, hi) -> str:
    fit = fit_exponent(sf, lo, hi)
    return (f"{label}: {kind} = {fit.exponent:.4f} +/- {fit.stderr:.4f} "
            f"(r2 {fit.r_squared:.4f}, range {fit.fit_min:g}-{fit.fit_max:g})")


def _fit_lo(args) -> float:
    return 10.0 if args.fit_min is None else args.fit_min


def _fit_hi(args, scales, n) -> float:
    return args.fit_max if args.fit_max is not None else default_fit_max(scales, n)


def _per_series(args, work) -> int:
    """Run ``work(path, label, out_dir)`` per input, isolating failures."""
    inputs = _inputs(args)
    out = _out_dir(args)
    status = EXIT_OK
    for path, label in inputs:
        try:
            line = work(path, label, out)
            if line:
                print(line)
        except (ValueError, OSError) as exc:
            print(f"{label}: FAILED: {exc}", file=sys.stderr)
            status = EXIT_SERIES_FAILED
    return status


def cmd_returns(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        io.write_returns(out / f"{label}_returns.csv", r, {"series": label})
        return f"{label}: {len(r)} returns"
    return _per_series(args, work)


def cmd_dfa(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        sf = dfa_fluctuation(r, args.dfa_order,
                             ScaleGrid(args.dfa_order + 2, len(r) // 4, args.grid_ppd))
        io.write_scaling_function(out / f"{label}_dfa{args.dfa_order}.csv", sf)
        return _fit_line(label, "alpha", sf, _fit_lo(args), _fit_hi(args, sf.scales, len(r)))
    return _per_series(args, work)


def cmd_dma(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        sf = dma_fluctuation(r, ScaleGrid(3, len(r) // 4, args.grid_ppd))
        io.write_scaling_function(out / f"{label}_cdma.csv", sf)
        return _fit_line(label, "H", sf, _fit_lo(args), _fit_hi(args, sf.scales, len(r)))
    return _per_series(args, work)


def cmd_wavelet(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        hi = args.fit_max if args.fit_max is not None else min(500, len(r) / 4)
        # fit range in days, mapped to the scales whose peak period matches
        a_lo, a_hi = (float(v) for v in period_to_scale([_fit_lo(args), hi], args.dog_order))
        scales = wavelet_scales(min(a_lo, 2.0), max(a_hi, 4.0), args.voices)
        sg = scalegram(cwt(r, WaveletSpec(args.dog_order), scales),
                       exclude_coi=args.exclude_coi)
        io.write_scaling_function(out / f"{label}_dog{args.dog_order}.csv", sg)
        io.write_scaling_function(out / f"{label}_dog{args.dog_order}_rescaled.csv",
                                  rescale_scalegram(sg))
        fit = fit_exponent(sg, a_lo, a_hi)
        return (f"{label}: beta = {fit.exponent:.4f} +/- {fit.stderr:.4f}, "
                f"(beta+1)/2 = {beta_to_alpha(fit.exponent):.4f} "
                f"(range {_fit_lo(args):g}-{hi:g} days, "
                f"scales {fit.fit_min:.3g}-{fit.fit_max:.3g})")
    return _per_series(args, work)


def cmd_tddma(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        cfg = TdConfig(window_size=args.window, step=args.step, r2_floor=args.r2_floor,
                       fit_lo=int(args.fit_min) if args.fit_min is not None else None,
                       fit_hi=int(args.fit_max) if args.fit_max is not None else None,
                       points_per_decade=args.grid_ppd)
        track = td_dma(r, cfg)
        io.write_track(out / f"{label}_tddma.csv", track, {"series": label})
        return (f"{label}: <H> = {track.mean_h:.4f} over {track.local_h.size} windows "
                f"(valid {track.valid_fraction:.3f})")
    return _per_series(args, work)


def cmd_cycles(args) -> int:
    def work(path, label, out):
        r = _returns(path, label)
        scales = wavelet_scales(2.0, max(len(r) / 20, 4.0), args.voices)
        hi = scalegram(cwt(r, WaveletSpec(args.dog_order), scales))
        lo = scalegram(cwt(r, WaveletSpec(1), scales))
        rep = detect_cycles(hi, lo, min_prominence=args.min_prominence)
        dfa = dfa_fluctuation(r, 2, ScaleGrid(4, len(r) // 4, args.grid_ppd))
        try:
            rep = dataclasses.replace(rep, crossover_scales=detect_crossovers(dfa))
        except ValueError:
            pass
        io.write_cycles(out / f"{label}_cycles.csv", rep, {"series": label})
        found = ", ".join(f"{p.period:.1f}" for p in rep.detected_periods) or "none"
        return f"{label}: periods {found}"
    return _per_series(args, work)


def cmd_fit(args) -> int:
    def work(path, label, out):
        sf = io.read_scaling_function(path)
        return _fit_line(label, "exponent", sf, args.fit_min, args.fit_max)
    return _per_series(args, work)


def cmd_synth(args) -> int:
    try:
        spec = SynthSpec(args.kind, args.length, args.seed, h_target=args.hurst,
                         period=args.period, amplitude_ratio=args.amplitude)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    label = args.label or spec.label
    prices = to_prices(generate(spec), name=label)
    header = {"kind": spec.kind, "length": spec.length, "seed": spec.seed}
    if spec.kind == "fgn":
        header["h_target"] = spec.h_target
    if spec.kind == "sinusoid_plus_noise":
        header.update(period=spec.period, amplitude_ratio=spec.amplitude_ratio)
    if args.out is None:
        tmp = ["date,close"] + [f"{d.isoformat()},{c:.10g}"
                                for d, c in zip(prices.dates, prices.closes)]
        sys.stdout.write("\n".join(f"# {k}={v}" for k, v in header.items()) + "\n")
        sys.stdout.write("\n".join(tmp) + "\n")
    else:
        out = _out_dir(args)
        io.write_prices(out / f"{label}.csv", prices, header)
        print(out / f"{label}.csv")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        cfg = RunConfig(
            inputs=tuple(_inputs(args)),
            dfa_order=args.dfa_order,
            points_per_decade=args.grid_ppd,
            voices_per_octave=args.voices,
            fit_min=_fit_lo(args),
            fit_max=args.fit_max,
            wavelet_orders=(1, args.dog_order),
            td=TdConfig(window_size=args.window, step=args.step,
                        points_per_decade=args.grid_ppd),
            out_dir=args.out or "out",
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = run_report(cfg)
    sys.stdout.write(format_table(rows))
    return EXIT_SERIES_FAILED if any(r.error for r in rows) else EXIT_OK


COMMANDS = {
    "returns": cmd_returns,
    "dfa": cmd_dfa,
    "dma": cmd_dma,
    "wavelet": cmd_wavelet,
    "tddma": cmd_tddma,
    "cycles": cmd_cycles,
    "fit": cmd_fit,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False)
                        else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
