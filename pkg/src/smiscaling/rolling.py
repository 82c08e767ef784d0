"""Time-dependent DMA: local Hurst exponents in a sliding window."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .detrended import ScaleGrid, centered_ma_residuals, dma_fluctuation
from .fitting import MIN_FIT_POINTS, fit_exponent
from .series import ReturnSeries

__all__ = ["TdConfig", "HurstTrack", "td_dma", "td_dma_reference", "mean_local_hurst"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TdConfig:
    """Sliding-window settings.

    ``scale_lo``/``scale_hi`` bound the cDMA grid inside each window and are
    clipped to ``[3, window_size // 4]``; ``fit_lo``/``fit_hi`` default to
    ``[11, 201]`` (clipped to the grid).
    """

    window_size: int = 1000
    step: int = 2
    scale_lo: int = 2
    scale_hi: int = 500
    fit_lo: int | None = None
    fit_hi: int | None = None
    min_window: int = 100
    r2_floor: float = 0.9
    points_per_decade: int = 40

    def __post_init__(self) -> None:
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.window_size < self.min_window:
            raise ValueError(
                f"window {self.window_size} below the minimum {self.min_window}"
            )
        if self.window_size < 12:
            raise ValueError("window too small for any cDMA scale")
        if not 0.0 <= self.r2_floor <= 1.0:
            raise ValueError("r2_floor must lie in [0, 1]")

    def resolved(self) -> tuple[np.ndarray, float, float, list[str]]:
        """Odd scale grid, fit bounds and notes on any clipping applied."""
        notes = []
        lo, hi = self.scale_lo, self.scale_hi
        if lo < 3:
            notes.append(f"scale floor raised from {lo} to 3 (odd centered windows)")
            lo = 3
        cap = self.window_size // 4
        if hi > cap:
            notes.append(f"scale ceiling clipped from {hi} to {cap} (window/4)")
            hi = cap
        scales = ScaleGrid(lo, hi, self.points_per_decade).scales(odd=True)
        fit_lo = 11 if self.fit_lo is None else self.fit_lo
        fit_hi = 201 if self.fit_hi is None else self.fit_hi
        fit_lo, fit_hi = max(fit_lo, scales[0]), min(fit_hi, scales[-1])
        n_fit = int(((scales >= fit_lo) & (scales <= fit_hi)).sum())
        if n_fit < MIN_FIT_POINTS:
            raise ValueError(
                f"fit range [{fit_lo}, {fit_hi}] holds {n_fit} grid points, "
                f"need {MIN_FIT_POINTS}"
            )
        return scales, float(fit_lo), float(fit_hi), notes


@dataclass(frozen=True, eq=False)
class HurstTrack:
    """Local Hurst exponents; NaN marks an invalid window."""

    positions: np.ndarray
    local_h: np.ndarray
    mean_h: float
    valid_fraction: float
    config: TdConfig = TdConfig()
    notes: list[str] = field(default_factory=list)
    series_name: str = "series"

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.local_h)


def _window_starts(size: int, cfg: TdConfig) -> np.ndarray:
    if size < cfg.window_size:
        raise ValueError(
            f"series of length {size} shorter than one window ({cfg.window_size})"
        )
    return np.arange(0, size - cfg.window_size + 1, cfg.step)


def _make_track(starts, local_h, cfg, notes, name) -> HurstTrack:
    valid = np.isfinite(local_h)
    mean_h = float(local_h[valid].mean()) if valid.any() else float("nan")
    return HurstTrack(
        positions=starts + cfg.window_size - 1,
        local_h=local_h,
        mean_h=mean_h,
        valid_fraction=float(valid.mean()) if valid.size else 0.0,
        config=cfg,
        notes=notes,
        series_name=name,
    )


def td_dma(returns, cfg: TdConfig = TdConfig()) -> HurstTrack:
    """Local cDMA Hurst exponent for every window position.

    Each window is analysed as a standalone series (its own mean-removed
    profile). The centered moving average reproduces linear functions
    exactly, so a window's detrended values coincide with those of the
    global profile at the window's interior positions; windows are therefore
    evaluated from running sums of the globally detrended squares.
    Windows with constant data or a fit below ``r2_floor`` are invalid.
    """
    if isinstance(returns, ReturnSeries):
        r, name = returns.values, returns.source_name
    else:
        r, name = np.asarray(returns, dtype=float), "series"
    scales, fit_lo, fit_hi, notes = cfg.resolved()
    for note in notes:
        log.info("tdDMA: %s", note)
    starts = _window_starts(r.size, cfg)
    ns = cfg.window_size

    y = np.cumsum(r - r.mean())
    in_fit = (scales >= fit_lo) & (scales <= fit_hi)
    fit_scales = scales[in_fit]
    sigma = np.empty((starts.size, fit_scales.size))
    for j, n in enumerate(fit_scales):
        n = int(n)
        d = centered_ma_residuals(y, n)
        csum = np.concatenate(([0.0], np.cumsum(d * d)))
        count = ns - n + 1
        ss = csum[starts + count] - csum[starts]
        sigma[:, j] = np.sqrt(np.maximum(ss, 0.0) / count)

    # constant windows: no change between consecutive returns
    changes = np.concatenate(([0], np.cumsum(np.diff(r) != 0)))
    constant = changes[starts + ns - 1] - changes[starts] == 0

    x = np.log10(fit_scales.astype(float))
    dx = x - x.mean()
    with np.errstate(divide="ignore", invalid="ignore"):
        ly = np.log10(sigma)
        dy = ly - ly.mean(axis=1, keepdims=True)
        slope = dy @ dx / (dx @ dx)
        sse = np.sum((dy - np.outer(slope, dx)) ** 2, axis=1)
        syy = np.sum(dy * dy, axis=1)
        r2 = np.where(syy > 0, 1.0 - sse / syy, 1.0)
    bad = constant | ~np.all(sigma > 0, axis=1) | ~np.isfinite(slope) | (r2 < cfg.r2_floor)
    local_h = np.where(bad, np.nan, slope)
    return _make_track(starts, local_h, cfg, notes, name)


def td_dma_reference(returns, cfg: TdConfig = TdConfig()) -> HurstTrack:
    """Window-by-window tdDMA: fresh profile, cDMA and fit per window."""
    if isinstance(returns, ReturnSeries):
        r, name = returns.values, returns.source_name
    else:
        r, name = np.asarray(returns, dtype=float), "series"
    scales, fit_lo, fit_hi, notes = cfg.resolved()
    starts = _window_starts(r.size, cfg)
    local_h = np.full(starts.size, np.nan)
    for i, s in enumerate(starts):
        window = r[s:s + cfg.window_size]
        if np.all(window == window[0]):
            continue
        sf = dma_fluctuation(window, scales=scales)
        try:
            fit = fit_exponent(sf, fit_lo, fit_hi)
        except ValueError:
            continue
        if fit.r_squared >= cfg.r2_floor and math.isfinite(fit.exponent):
            local_h[i] = fit.exponent
    return _make_track(starts, local_h, cfg, notes, name)


def mean_local_hurst(track: HurstTrack) -> float:
    """Average of the valid local exponents."""
    valid = np.isfinite(track.local_h)
    if not valid.any():
        raise ValueError("track has no valid windows")
    return float(track.local_h[valid].mean())
