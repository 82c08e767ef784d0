"""Plain-text readers and writers for prices and analysis products.

Every file is comma-separated with optional ``#`` comment lines on top.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .cycles import CycleReport
from .detrended import ScalingFunction
from .rolling import HurstTrack
from .series import PriceSeries, ReturnSeries
from .wavelet import WaveletField

__all__ = [
    "IngestError",
    "read_prices",
    "write_prices",
    "write_returns",
    "write_scaling_function",
    "read_scaling_function",
    "write_track",
    "write_cycles",
    "write_field",
]


class IngestError(ValueError):
    """Malformed price file; ``line`` is the 1-based line number (or None)."""

    def __init__(self, path, line: int | None, message: str) -> None:
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _fmt(x: float) -> str:
    return "" if not math.isfinite(x) else format(float(x), ".12e")


def _comment_lines(header: Mapping[str, object] | None) -> list[str]:
    if not header:
        return []
    return [f"# {k}={v}" for k, v in header.items()]


def _write(path, header, columns: str, rows: Iterable[str]) -> None:
    lines = _comment_lines(header) + [columns, *rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_prices(path, label: str | None = None) -> PriceSeries:
    """Parse a ``date,close`` file into a validated :class:`PriceSeries`."""
    path = Path(path)
    if not path.is_file():
        raise IngestError(path, None, "no such file")
    dates: list[dt.date] = []
    closes: list[float] = []
    header_seen = False
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if not header_seen:
                if [c.lower() for c in cells] != ["date", "close"]:
                    raise IngestError(path, lineno, "expected header 'date,close'")
                header_seen = True
                continue
            if len(cells) != 2:
                raise IngestError(path, lineno, f"expected 2 fields, got {len(cells)}")
            try:
                day = dt.date.fromisoformat(cells[0])
            except ValueError:
                raise IngestError(path, lineno, f"bad ISO date {cells[0]!r}") from None
            try:
                close = float(cells[1])
            except ValueError:
                raise IngestError(path, lineno, f"bad close value {cells[1]!r}") from None
            if not math.isfinite(close) or close <= 0:
                raise IngestError(path, lineno, f"close must be positive, got {cells[1]}")
            if dates and day == dates[-1]:
                raise IngestError(path, lineno, f"duplicate date {day.isoformat()}")
            if dates and day < dates[-1]:
                raise IngestError(
                    path, lineno,
                    f"dates out of order: {day.isoformat()} after {dates[-1].isoformat()}",
                )
            dates.append(day)
            closes.append(close)
    if not header_seen:
        raise IngestError(path, None, "empty file")
    if len(closes) < 2:
        raise IngestError(path, None, "need at least 2 price rows")
    return PriceSeries(tuple(dates), np.array(closes), name=label or path.stem)


def write_prices(path, prices: PriceSeries, header=None) -> None:
    rows = (f"{d.isoformat()},{c:.10g}" for d, c in zip(prices.dates, prices.closes))
    _write(path, header, "date,close", rows)


def write_returns(path, returns: ReturnSeries, header=None) -> None:
    rows = (f"{k},{_fmt(v)}" for k, v in enumerate(returns.values, start=1))
    _write(path, header, "k,return", rows)


def _fmt_scale(s) -> str:
    if isinstance(s, (int, np.integer)):
        return str(int(s))
    return format(float(s), ".12g")


def write_scaling_function(path, sf: ScalingFunction, header=None) -> None:
    meta = {"method": sf.method, "order": sf.order, "series": sf.series_name}
    meta.update(header or {})
    rows = (f"{_fmt_scale(s)},{_fmt(v)}" for s, v in zip(sf.scales, sf.values))
    _write(path, meta, "scale,value", rows)


def read_scaling_function(path, method: str = "DFA", order: int = 0) -> ScalingFunction:
    """Read a ``scale,value`` file; ``method``/``order`` comments win if present."""
    path = Path(path)
    meta: dict[str, str] = {}
    scales, values = [], []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
                continue
            if line.lower() == "scale,value":
                continue
            try:
                s, v = line.split(",")
                scales.append(float(s))
                values.append(float(v))
            except ValueError:
                raise IngestError(path, lineno, f"bad row {line!r}") from None
    method = meta.get("method", method)
    order = int(meta.get("order", order))
    arr = np.array(scales)
    if arr.size and np.all(arr == np.rint(arr)) and method in ("DFA", "cDMA"):
        arr = arr.astype(int)
    return ScalingFunction(method, order, arr, np.array(values),
                           meta.get("series", path.stem))


def write_track(path, track: HurstTrack, header=None) -> None:
    meta = {
        "mean_h": _fmt(track.mean_h) or "nan",
        "valid_fraction": format(track.valid_fraction, ".6f"),
        "window": track.config.window_size,
        "step": track.config.step,
        "r2_floor": track.config.r2_floor,
    }
    for i, note in enumerate(track.notes):
        meta[f"note{i + 1}"] = note
    meta.update(header or {})
    rows = (f"{p},{_fmt(h)}" for p, h in zip(track.positions, track.local_h))
    _write(path, meta, "position,local_h", rows)


def write_cycles(path, report: CycleReport, header=None) -> None:
    meta = {
        "baseline_exponent": _fmt(report.baseline.exponent),
        "baseline_r_squared": format(report.baseline.r_squared, ".6f"),
        "threshold": _fmt(report.threshold),
        "wavelet_order": report.order,
    }
    if report.crossover_scales:
        meta["crossover_scales"] = " ".join(f"{s:g}" for s in report.crossover_scales)
    meta.update(header or {})
    rows = (
        ",".join(_fmt(x) for x in (p.period, p.prominence, p.window_low,
                                   p.window_high, p.scale, p.low_order_prominence))
        for p in report.detected_periods
    )
    _write(path, meta,
           "period,prominence,window_low,window_high,scale,low_order_prominence",
           rows)


def write_field(path, field: WaveletField, header=None) -> None:
    cols = "scale," + ",".join(str(int(b)) for b in field.translations)
    rows = (
        format(float(a), ".12g") + "," + ",".join(_fmt(c) for c in row)
        for a, row in zip(field.scales, field.coefficients)
    )
    _write(path, header, cols, rows)
