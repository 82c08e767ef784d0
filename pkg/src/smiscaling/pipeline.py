"""Batch analysis: every estimator on every input series, plus a summary table."""
from __future__ import annotations

import csv
import dataclasses
import io as io_mod
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .cycles import CycleReport, detect_cycles
from .detrended import ScaleGrid, ScalingFunction, dfa_fluctuation, dma_fluctuation
from .fitting import ExponentFit, beta_to_alpha, detect_crossovers, fit_exponent
from .rolling import HurstTrack, TdConfig, td_dma
from .series import PriceSeries, ReturnSeries, log_returns
from .wavelet import (
    WaveletSpec,
    cwt,
    period_to_scale,
    rescale_scalegram,
    scalegram,
    wavelet_scales,
)

__all__ = [
    "RunConfig",
    "SeriesAnalysis",
    "ReportRow",
    "default_fit_max",
    "analyze_returns",
    "run_report",
    "format_table",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple[tuple[str, str], ...] = ()
    dfa_order: int = 2
    points_per_decade: int = 40
    voices_per_octave: int = 16
    fit_min: float = 10
    fit_max: float | None = None
    wavelet_orders: tuple[int, int] = (1, 10)
    td: TdConfig = TdConfig()
    cycle_scale_fraction: float = 1 / 20
    min_prominence: float = 0.6
    prominence_threshold: float = 3.0
    out_dir: str = "out"

    def __post_init__(self) -> None:
        labels = [label for _, label in self.inputs]
        if len(set(labels)) != len(labels):
            raise ValueError("input labels must be unique")
        if self.fit_max is not None and self.fit_max <= self.fit_min:
            raise ValueError("fit_max must exceed fit_min")
        if self.dfa_order < 1:
            raise ValueError("dfa_order must be >= 1")


@dataclass
class SeriesAnalysis:
    """All products of one series; every headline number keeps its fit."""

    name: str
    n_returns: int
    fit_range: tuple[float, float]
    dfa: ScalingFunction
    dma: ScalingFunction
    scalegrams: dict[int, ScalingFunction]
    rescaled: ScalingFunction
    dfa_fit: ExponentFit
    dma_fit: ExponentFit
    beta_fit: ExponentFit
    wt_alpha_fit: ExponentFit
    track: HurstTrack
    cycles: CycleReport
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ReportRow:
    name: str
    fit_range: tuple[float, float] | None = None
    alpha: ExponentFit | None = None
    hurst: ExponentFit | None = None
    mean_local_h: float = float("nan")
    beta: ExponentFit | None = None
    periods: tuple[float, ...] = ()
    error: str | None = None

    @property
    def beta_alpha(self) -> float:
        return beta_to_alpha(self.beta.exponent) if self.beta else float("nan")


def default_fit_max(grid_scales: np.ndarray, n: int) -> int:
    """Largest grid scale not above ``min(500, N/4)``."""
    cap = min(500, n / 4)
    eligible = grid_scales[grid_scales <= cap]
    if eligible.size == 0:
        raise ValueError(f"series of length {n} too short for the default fit range")
    return int(eligible[-1])


def analyze_returns(returns: ReturnSeries, cfg: RunConfig = RunConfig()) -> SeriesAnalysis:
    """Run DFA, cDMA, both DOG scalegrams, tdDMA and cycle detection."""
    n = len(returns)
    notes: list[str] = []
    if n < 40:
        raise ValueError(f"series of {n} returns is too short to analyse")
    dfa_grid = ScaleGrid(cfg.dfa_order + 2, n // 4, cfg.points_per_decade)
    dfa = dfa_fluctuation(returns, cfg.dfa_order, dfa_grid)
    dma = dma_fluctuation(returns, ScaleGrid(3, n // 4, cfg.points_per_decade))

    fit_lo = cfg.fit_min
    fit_hi = cfg.fit_max if cfg.fit_max is not None else default_fit_max(dfa.scales, n)
    dfa_fit = fit_exponent(dfa, fit_lo, fit_hi)
    dma_fit = fit_exponent(dma, fit_lo, fit_hi)

    low, high = cfg.wavelet_orders
    cycle_hi = max(cfg.cycle_scale_fraction * n, 4.0)
    # the fit range is in days; scalegrams are fitted over the matching scales
    a_lo, a_hi = (float(v) for v in period_to_scale([fit_lo, fit_hi], low))
    a_scales = wavelet_scales(min(a_lo, 2.0), max(a_hi, cycle_hi), cfg.voices_per_octave)
    sg_low = scalegram(cwt(returns, WaveletSpec(low), a_scales))
    beta_fit = fit_exponent(sg_low, a_lo, a_hi)
    rescaled = rescale_scalegram(sg_low)
    wt_alpha_fit = fit_exponent(rescaled, a_lo, a_hi)

    in_cycle = a_scales <= cycle_hi
    c_scales = a_scales[in_cycle]
    sg_high = scalegram(cwt(returns, WaveletSpec(high), c_scales))
    sg_low_c = ScalingFunction("scalegram", low, c_scales, sg_low.values[in_cycle],
                               sg_low.series_name)
    cycles = detect_cycles(sg_high, sg_low_c, cfg.prominence_threshold,
                           cfg.min_prominence)
    try:
        crossovers = detect_crossovers(dfa)
    except ValueError as exc:
        crossovers = []
        notes.append(f"crossovers skipped: {exc}")
    cycles = dataclasses.replace(cycles, crossover_scales=crossovers)

    td_cfg = cfg.td
    if n < td_cfg.window_size:
        notes.append(f"tdDMA window reduced from {td_cfg.window_size} to {n} (series length)")
        td_cfg = dataclasses.replace(td_cfg, window_size=n,
                                     min_window=min(td_cfg.min_window, n))
    track = td_dma(returns, td_cfg)
    notes.extend(track.notes)
    for note in notes:
        log.info("%s: %s", returns.source_name, note)

    return SeriesAnalysis(
        name=returns.source_name,
        n_returns=n,
        fit_range=(float(fit_lo), float(fit_hi)),
        dfa=dfa,
        dma=dma,
        scalegrams={low: sg_low, high: sg_high},
        rescaled=rescaled,
        dfa_fit=dfa_fit,
        dma_fit=dma_fit,
        beta_fit=beta_fit,
        wt_alpha_fit=wt_alpha_fit,
        track=track,
        cycles=cycles,
        notes=notes,
    )


def _provenance(cfg: RunConfig, a: SeriesAnalysis) -> dict[str, object]:
    return {
        "series": a.name,
        "n_returns": a.n_returns,
        "fit_range": f"{a.fit_range[0]:g}-{a.fit_range[1]:g}",
        "dfa_order": cfg.dfa_order,
        "points_per_decade": cfg.points_per_decade,
        "voices_per_octave": cfg.voices_per_octave,
    }


def write_analysis(a: SeriesAnalysis, cfg: RunConfig, out_dir: Path) -> None:
    base = _provenance(cfg, a)
    low, high = cfg.wavelet_orders
    io.write_scaling_function(out_dir / f"{a.name}_dfa{cfg.dfa_order}.csv", a.dfa, base)
    io.write_scaling_function(out_dir / f"{a.name}_cdma.csv", a.dma, base)
    io.write_scaling_function(out_dir / f"{a.name}_dog{low}.csv", a.scalegrams[low], base)
    io.write_scaling_function(out_dir / f"{a.name}_dog{low}_rescaled.csv", a.rescaled, base)
    io.write_scaling_function(out_dir / f"{a.name}_dog{high}.csv", a.scalegrams[high], base)
    io.write_track(out_dir / f"{a.name}_tddma.csv", a.track, base)
    io.write_cycles(out_dir / f"{a.name}_cycles.csv", a.cycles, base)


def _row(a: SeriesAnalysis) -> ReportRow:
    return ReportRow(
        name=a.name,
        fit_range=a.fit_range,
        alpha=a.dfa_fit,
        hurst=a.dma_fit,
        mean_local_h=a.track.mean_h,
        beta=a.beta_fit,
        periods=tuple(p.period for p in a.cycles.detected_periods),
    )


def _two(x: float) -> str:
    return f"{x:.2f}" if math.isfinite(x) else "-"


def format_table(rows: list[ReportRow]) -> str:
    """Two-decimal summary table, one line per series."""
    head = ("SMI", "Fitting Range", "alpha", "H", "<H>", "(beta) beta_a/H", "Cycles (days)")
    lines = []
    for r in rows:
        if r.error is not None:
            lines.append((r.name, "FAILED", "-", "-", "-", "-", r.error))
            continue
        lo, hi = r.fit_range
        lines.append((
            r.name,
            f"{lo:g}-{hi:g}",
            _two(r.alpha.exponent),
            _two(r.hurst.exponent),
            _two(r.mean_local_h),
            f"({_two(r.beta.exponent)}) {_two(r.beta_alpha)}",
            " ".join(f"{p:.0f}" for p in r.periods) or "-",
        ))
    widths = [max(len(str(x)) for x in col) for col in zip(head, *lines)]
    fmt = lambda row: "  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip()
    return "\n".join([fmt(head), *map(fmt, lines)]) + "\n"


def _full_precision(rows: list[ReportRow]) -> str:
    cols = ("series", "fit_min", "fit_max", "alpha", "alpha_stderr", "alpha_r2",
            "H", "H_stderr", "H_r2", "mean_local_h", "beta", "beta_stderr", "beta_r2",
            "beta_alpha", "periods", "error")
    buf = io_mod.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    g = lambda x: format(x, ".10g") if math.isfinite(x) else ""
    for r in rows:
        if r.error is not None:
            writer.writerow([r.name] + [""] * (len(cols) - 2) + [r.error])
            continue
        f = lambda e: (g(e.exponent), g(e.stderr), g(e.r_squared))
        writer.writerow((
            r.name, g(r.fit_range[0]), g(r.fit_range[1]),
            *f(r.alpha), *f(r.hurst), g(r.mean_local_h), *f(r.beta),
            g(r.beta_alpha), " ".join(f"{p:.6g}" for p in r.periods), "",
        ))
    return buf.getvalue()


def run_report(cfg: RunConfig, prices: dict[str, PriceSeries] | None = None,
               ) -> list[ReportRow]:
    """Analyse every input series, write all products and the report.

    ``prices`` may supply already-loaded series by label; any other input is
    read from its path. A failure in one series is recorded in its row and
    does not stop the others.
    """
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[ReportRow] = []
    for path, label in cfg.inputs:
        try:
            ps = (prices or {}).get(label) or io.read_prices(path, label)
            returns = ReturnSeries(log_returns(ps).values, source_name=label)
            analysis = analyze_returns(returns, cfg)
            write_analysis(analysis, cfg, out_dir)
            rows.append(_row(analysis))
        except (ValueError, OSError) as exc:
            log.error("%s: %s", label, exc)
            rows.append(ReportRow(name=label, error=str(exc)))
    (out_dir / "report.txt").write_text(format_table(rows))
    (out_dir / "report.csv").write_text(_full_precision(rows))
    return rows
