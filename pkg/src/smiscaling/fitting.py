"""Log-log power-law fits, exponent conversion and crossover detection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detrended import ScalingFunction

__all__ = [
    "ExponentFit",
    "fit_exponent",
    "beta_to_alpha",
    "alpha_to_beta",
    "local_slopes",
    "detect_crossovers",
]

MIN_FIT_POINTS = 5


@dataclass(frozen=True)
class ExponentFit:
    """Slope of a scaling function in log10-log10 coordinates."""

    exponent: float
    intercept: float
    fit_min: float
    fit_max: float
    stderr: float
    r_squared: float
    method: str
    n_points: int

    def predict(self, scales) -> np.ndarray:
        scales = np.asarray(scales, dtype=float)
        return 10.0 ** (self.intercept + self.exponent * np.log10(scales))


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    n = x.size
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = dy - slope * dx
    sse = float(resid @ resid)
    syy = float(dy @ dy)
    stderr = math.sqrt(sse / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    return slope, float(intercept), stderr, min(max(r2, 0.0), 1.0)


def fit_exponent(sf: ScalingFunction, fit_min: float | None = None,
                 fit_max: float | None = None) -> ExponentFit:
    """Least-squares line through ``(log10 scale, log10 value)`` in range.

    Every grid point in ``[fit_min, fit_max]`` gets equal weight; points with
    value zero are dropped. At least five usable points are required.
    """
    scales = np.asarray(sf.scales, dtype=float)
    values = sf.values
    lo = scales[0] if fit_min is None else fit_min
    hi = scales[-1] if fit_max is None else fit_max
    if not lo < hi:
        raise ValueError(f"empty fit range [{lo}, {hi}]")
    mask = (scales >= lo) & (scales <= hi)
    if not np.any(values[mask] > 0):
        raise ValueError("all values in the fit range are zero (degenerate series)")
    mask &= values > 0
    if mask.sum() < MIN_FIT_POINTS:
        raise ValueError(
            f"only {int(mask.sum())} usable points in [{lo:g}, {hi:g}], "
            f"need {MIN_FIT_POINTS}"
        )
    x = np.log10(scales[mask])
    y = np.log10(values[mask])
    slope, intercept, stderr, r2 = _ols(x, y)
    return ExponentFit(
        exponent=slope,
        intercept=intercept,
        fit_min=float(scales[mask][0]),
        fit_max=float(scales[mask][-1]),
        stderr=stderr,
        r_squared=r2,
        method=sf.method,
        n_points=int(mask.sum()),
    )


def beta_to_alpha(beta: float) -> float:
    """Spectral exponent to fluctuation exponent, ``(beta + 1) / 2``."""
    return (beta + 1.0) / 2.0


def alpha_to_beta(alpha: float) -> float:
    return 2.0 * alpha - 1.0


def local_slopes(x: np.ndarray, y: np.ndarray, window: int) -> np.ndarray:
    """OLS slope over each run of ``window`` consecutive points.

    Entry ``i`` covers points ``i .. i + window - 1``.
    """
    from numpy.lib.stride_tricks import sliding_window_view

    xs = sliding_window_view(x, window)
    ys = sliding_window_view(y, window)
    dx = xs - xs.mean(axis=1, keepdims=True)
    dy = ys - ys.mean(axis=1, keepdims=True)
    return np.einsum("ij,ij->i", dx, dy) / np.einsum("ij,ij->i", dx, dx)


def detect_crossovers(sf: ScalingFunction, window: int = 5,
                      slope_delta_threshold: float = 0.15) -> list[float]:
    """Scales where the log-log slope changes by more than a threshold.

    At each interior grid point the slope fitted over the ``window`` points
    to its left is compared with the slope over the ``window`` points to its
    right (the point itself belongs to both). Runs of points above the
    threshold are reduced to their strongest member, and retained
    crossovers are at least ``window`` points apart.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    if len(sf) < 3 * window:
        raise ValueError(
            f"{len(sf)} points is too short for window {window} "
            f"(need {3 * window})"
        )
    if np.any(sf.values <= 0):
        raise ValueError("crossover detection needs positive values")
    x = np.log10(np.asarray(sf.scales, dtype=float))
    y = np.log10(sf.values)
    slopes = local_slopes(x, y, window)
    # centre i: left window ends at i, right window starts at i
    centers = np.arange(window - 1, x.size - window + 1)
    delta = np.abs(slopes[centers] - slopes[centers - window + 1])
    above = delta > slope_delta_threshold

    picks: list[int] = []
    i = 0
    while i < centers.size:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < centers.size and above[j + 1]:
            j += 1
        best = i + int(np.argmax(delta[i:j + 1]))
        picks.append(best)
        i = j + 1

    # strongest first, suppress neighbours closer than one window
    kept: list[int] = []
    for k in sorted(picks, key=lambda p: -delta[p]):
        if all(abs(centers[k] - centers[o]) >= window for o in kept):
            kept.append(k)
    return [float(sf.scales[centers[k]]) for k in sorted(kept)]
