"""Periodic-trend detection from high- versus low-order DOG scalegrams."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .detrended import ScalingFunction
from .fitting import ExponentFit, MIN_FIT_POINTS, _ols
from .wavelet import dog_fourier_factor

__all__ = [
    "DetectedPeriod",
    "CycleReport",
    "BaselineFit",
    "robust_baseline",
    "detect_cycles",
]


@dataclass(frozen=True)
class DetectedPeriod:
    """One protrusion above the power-law background of a scalegram.

    ``period`` is the Fourier-equivalent period ``2 pi a / sqrt(m + 1/2)`` of
    the peak scale ``scale``. ``prominence`` is the log10 excess of the
    scalegram over its baseline at the peak; ``low_order_prominence`` is the
    largest excess of the low-order scalegram around the same period.
    """

    period: float
    scale: float
    prominence: float
    window_low: float
    window_high: float
    low_order_prominence: float = float("nan")


@dataclass(frozen=True)
class BaselineFit:
    fit: ExponentFit
    residuals: np.ndarray
    inliers: np.ndarray
    mad: float


@dataclass(frozen=True)
class CycleReport:
    detected_periods: list[DetectedPeriod]
    baseline: ExponentFit
    crossover_scales: list[float] = field(default_factory=list)
    threshold: float = float("nan")
    order: int = 10


def _mad(x: np.ndarray) -> float:
    return float(np.median(np.abs(x - np.median(x))))


def robust_baseline(sf: ScalingFunction, exclusion_mads: float = 2.0) -> BaselineFit:
    """Power-law fit with protruding points excluded.

    Fits all points, drops those whose residual exceeds the median residual
    by more than ``exclusion_mads`` MADs, then refits on the rest.
    """
    if np.any(sf.values <= 0):
        raise ValueError("baseline needs strictly positive values")
    x = np.log10(np.asarray(sf.scales, dtype=float))
    y = np.log10(sf.values)
    if x.size < MIN_FIT_POINTS:
        raise ValueError("too few points for a baseline fit")
    slope, icpt, _, _ = _ols(x, y)
    resid = y - (icpt + slope * x)
    med, mad = np.median(resid), _mad(resid)
    inliers = resid - med <= exclusion_mads * mad
    if inliers.sum() < MIN_FIT_POINTS:
        raise ValueError(
            f"degenerate baseline: {int(inliers.sum())} points left after exclusion"
        )
    slope, icpt, stderr, r2 = _ols(x[inliers], y[inliers])
    resid = y - (icpt + slope * x)
    fit = ExponentFit(slope, icpt, float(sf.scales[0]), float(sf.scales[-1]),
                      stderr, r2, sf.method, int(inliers.sum()))
    return BaselineFit(fit, resid, inliers, _mad(resid[inliers]))


def detect_cycles(sg_high_order: ScalingFunction, sg_low_order: ScalingFunction,
                  prominence_threshold: float = 3.0,
                  min_prominence: float = 0.6) -> CycleReport:
    """Find periodic-like trends as bumps in a high-order DOG scalegram.

    A power-law baseline is fitted robustly (see :func:`robust_baseline`) and
    local maxima of the log10 residual whose topographic prominence exceeds
    ``max(prominence_threshold * MAD, min_prominence)`` are reported. Each
    peak scale is converted to a period with the DOG wavelength factor.

    Parameters
    ----------
    sg_high_order, sg_low_order : ScalingFunction
        Scalegrams (e.g. DOG10 and DOG1) on the same scale grid.
    prominence_threshold : float
        Detection threshold in residual MADs.
    min_prominence : float
        Absolute floor on the threshold, in log10 units. It keeps the
        detector quiet on very smooth scalegrams, where the MAD collapses.
    """
    if (len(sg_high_order) != len(sg_low_order)
            or not np.allclose(sg_high_order.scales, sg_low_order.scales)):
        raise ValueError("scalegrams must share the same scale grid")
    scales = np.asarray(sg_high_order.scales, dtype=float)
    high = robust_baseline(sg_high_order)
    low = robust_baseline(sg_low_order)
    threshold = max(prominence_threshold * high.mad, min_prominence)

    peaks, props = find_peaks(high.residuals, prominence=threshold)
    m_hi, m_lo = sg_high_order.order, sg_low_order.order
    out = []
    for k, p in enumerate(peaks):
        period = scales[p] * dog_fourier_factor(m_hi)
        lo_i, hi_i = props["left_bases"][k], props["right_bases"][k]
        # the same period sits at a smaller scale in the low-order transform
        a_low = period / dog_fourier_factor(m_lo)
        near = (scales >= a_low / 1.5) & (scales <= a_low * 1.5)
        low_prom = float(low.residuals[near].max()) if near.any() else float("nan")
        out.append(DetectedPeriod(
            period=float(period),
            scale=float(scales[p]),
            prominence=float(high.residuals[p]),
            window_low=float(scales[lo_i] * dog_fourier_factor(m_hi)),
            window_high=float(scales[hi_i] * dog_fourier_factor(m_hi)),
            low_order_prominence=low_prom,
        ))
    return CycleReport(out, high.fit, threshold=float(threshold), order=m_hi)
