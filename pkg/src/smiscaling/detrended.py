"""Detrended fluctuation functions: DFA of arbitrary order and centered DMA."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sp_fft

from .series import ReturnSeries, profile

__all__ = [
    "ScalingFunction",
    "ScaleGrid",
    "dfa_fluctuation",
    "dma_fluctuation",
    "dfa_segment_rss",
    "centered_ma_residuals",
    "METHODS",
]

METHODS = ("DFA", "cDMA", "scalegram", "rescaled-scalegram")

# chunk size (window elements) for the direct projection
_DIRECT_LIMIT = 2_000_000
# "auto" uses the direct projection up to this segment length
_DIRECT_MAX_SCALE = 24


@dataclass(frozen=True, eq=False)
class ScalingFunction:
    """A (scale, value) curve produced by one of the estimators."""

    method: str
    order: int
    scales: np.ndarray
    values: np.ndarray
    series_name: str = "series"

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        scales = np.asarray(self.scales)
        values = np.asarray(self.values, dtype=float)
        if scales.ndim != 1 or scales.shape != values.shape:
            raise ValueError("scales and values must be 1-D and of equal length")
        if np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
            raise ValueError("scales must be positive and strictly ascending")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("values must be finite and non-negative")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.scales.size


@dataclass(frozen=True)
class ScaleGrid:
    """Log-spaced integer scales between ``min_scale`` and ``max_scale``."""

    min_scale: int
    max_scale: int
    points_per_decade: int = 40

    def __post_init__(self) -> None:
        if self.min_scale < 1 or self.max_scale < 1:
            raise ValueError("scales must be positive")
        if self.max_scale < self.min_scale:
            raise ValueError("max_scale must be >= min_scale")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be positive")

    def scales(self, odd: bool = False) -> np.ndarray:
        lo, hi = math.log10(self.min_scale), math.log10(self.max_scale)
        num = max(int(round((hi - lo) * self.points_per_decade)) + 1, 2)
        raw = np.logspace(lo, hi, num)
        if not odd:
            out = np.rint(raw).astype(int)
            return np.unique(np.clip(out, self.min_scale, self.max_scale))
        lo_odd = self.min_scale + (1 - self.min_scale % 2)
        hi_odd = self.max_scale - (1 - self.max_scale % 2)
        if hi_odd < lo_odd:
            raise ValueError("grid contains no odd scale")
        out = 2 * np.rint((raw - 1) / 2).astype(int) + 1
        return np.unique(np.clip(out, lo_odd, hi_odd))


def _orthonormal_poly_basis(n: int, order: int) -> np.ndarray:
    # QR of a scaled, centered Vandermonde matrix; same column space as 1..n
    x = np.arange(1, n + 1, dtype=float)
    x = (x - x.mean()) / max(n / 2.0, 1.0)
    q, _ = np.linalg.qr(np.vander(x, order + 1, increasing=True))
    return q


def _rss_direct(y: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = q.shape[0]
    windows = sliding_window_view(y, n)
    out = np.empty(windows.shape[0])
    chunk = max(1, _DIRECT_LIMIT // n)
    for start in range(0, windows.shape[0], chunk):
        w = windows[start:start + chunk]
        resid = w - (w @ q) @ q.T
        out[start:start + chunk] = np.einsum("ij,ij->i", resid, resid)
    return out


def _rss_fft(y: np.ndarray, q: np.ndarray) -> np.ndarray:
    n, order = q.shape[0], q.shape[1] - 1
    size = y.size
    starts = size - n + 1
    block = max(8 * n, 1024)
    nfft = sp_fft.next_fast_len(block + 2 * n - 2, real=True)
    k_hat = sp_fft.rfft(q[::-1].T, nfft, axis=-1)
    out = np.empty(starts)
    for s in range(0, starts, block):
        m = min(block, starts - s)
        seg = y[s:s + m + n - 1]
        # removing a chunk-wide polynomial of degree <= order leaves every
        # window residual unchanged and shrinks the sums that cancel below
        t = np.linspace(-1.0, 1.0, seg.size)
        seg = seg - np.polynomial.polynomial.polyval(
            t, np.polynomial.polynomial.polyfit(t, seg, order))
        coef = sp_fft.irfft(sp_fft.rfft(seg, nfft) * k_hat, nfft,
                            axis=-1)[:, n - 1:n - 1 + m]
        sq = np.concatenate(([0.0], np.cumsum(seg * seg)))
        total = sq[n:n + m] - sq[:m]
        out[s:s + m] = np.maximum(total - np.einsum("ij,ij->j", coef, coef), 0.0)
    return out


def dfa_segment_rss(y: np.ndarray, n: int, order: int,
                    method: str = "auto") -> np.ndarray:
    """Residual sum of squares after polynomial detrending of every segment.

    Segments are the ``len(y) - n + 1`` windows of length ``n`` at stride 1.
    ``method`` is ``"direct"`` (explicit projection, no cancellation),
    ``"fft"`` (correlation with the orthonormal basis via FFT) or ``"auto"``.
    """
    y = np.asarray(y, dtype=float)
    if n < order + 2:
        raise ValueError(f"scale {n} too small for order {order}")
    if n > y.size:
        raise ValueError(f"scale {n} exceeds series length {y.size}")
    q = _orthonormal_poly_basis(n, order)
    if method == "auto":
        method = "direct" if n <= _DIRECT_MAX_SCALE else "fft"
    if method == "direct":
        return _rss_direct(y, q)
    if method == "fft":
        return _rss_fft(y, q)
    raise ValueError(f"unknown method {method!r}")


def _returns_array(returns) -> tuple[np.ndarray, str]:
    if isinstance(returns, ReturnSeries):
        return returns.values, returns.source_name
    return np.asarray(returns, dtype=float), "series"


def _check_grid(scales: np.ndarray, size: int, lower: int, label: str) -> None:
    if scales.size == 0:
        raise ValueError("empty scale grid")
    if scales[0] < lower:
        raise ValueError(f"{label}: minimum scale {scales[0]} below {lower}")
    if size < 4 * scales[0]:
        raise ValueError(
            f"{label}: series of length {size} shorter than 4 x min scale"
        )
    if scales[-1] > size / 4:
        raise ValueError(
            f"{label}: max scale {scales[-1]} exceeds N/4 = {size / 4:g}"
        )


def dfa_fluctuation(returns, order: int = 2, grid: ScaleGrid | None = None,
                    scales=None, method: str = "auto") -> ScalingFunction:
    """DFA fluctuation function F(n) over maximally overlapping segments.

    Parameters
    ----------
    returns : ReturnSeries or array_like
        Return series; the profile is built internally.
    order : int
        Degree of the local polynomial trend (2 gives DFA2).
    grid : ScaleGrid, optional
        Scale grid; ignored when ``scales`` is given. Defaults to
        ``order + 2 .. N/4``.
    scales : array_like of int, optional
        Explicit ascending scales.
    method : str
        Segment projection route, see :func:`dfa_segment_rss`.

    Returns
    -------
    ScalingFunction
        ``F(n) = sqrt(sum_i sum_l y_{n,i}(l)^2 / ((N - n + 1) n))``.
    """
    r, name = _returns_array(returns)
    if order < 1:
        raise ValueError("DFA order must be >= 1")
    size = r.size
    if scales is None:
        if grid is None:
            grid = ScaleGrid(order + 2, max(size // 4, order + 2))
        scales = grid.scales()
    scales = np.asarray(scales, dtype=int)
    if np.any(np.diff(scales) <= 0):
        raise ValueError("scales must be strictly ascending")
    _check_grid(scales, size, order + 2, "DFA")
    y = profile(r).values
    values = np.empty(scales.size)
    for j, n in enumerate(scales):
        rss = dfa_segment_rss(y, int(n), order, method=method)
        values[j] = math.sqrt(rss.sum() / ((size - n + 1) * n))
    return ScalingFunction("DFA", order, scales, values, name)


def centered_ma_residuals(x: np.ndarray, n: int) -> np.ndarray:
    """``x(i)`` minus its centered moving average of odd width ``n``.

    Only interior positions (where the full window fits) are returned, so the
    output has ``len(x) - n + 1`` entries aligned with ``x[(n-1)//2:]``.
    """
    x = np.asarray(x, dtype=float)
    if n < 1 or n % 2 == 0:
        raise ValueError(f"moving-average width must be odd, got {n}")
    if n > x.size:
        raise ValueError(f"width {n} exceeds series length {x.size}")
    half = (n - 1) // 2
    csum = np.concatenate(([0.0], np.cumsum(x)))
    mean = (csum[n:] - csum[:-n]) / n
    return x[half:x.size - half] - mean


def dma_fluctuation(returns, grid: ScaleGrid | None = None,
                    scales=None) -> ScalingFunction:
    """Centered DMA fluctuation function sigma(n) on odd scales.

    Boundary positions, where the centered window does not fit, are left out
    of the mean square.
    """
    r, name = _returns_array(returns)
    size = r.size
    if scales is None:
        if grid is None:
            grid = ScaleGrid(3, max(size // 4, 3))
        scales = grid.scales(odd=True)
    scales = np.asarray(scales, dtype=int)
    if np.any(scales % 2 == 0):
        raise ValueError("cDMA scales must be odd")
    if np.any(np.diff(scales) <= 0):
        raise ValueError("scales must be strictly ascending")
    _check_grid(scales, size, 3, "cDMA")
    y = profile(r).values
    values = np.empty(scales.size)
    for j, n in enumerate(scales):
        d = centered_ma_residuals(y, int(n))
        values[j] = math.sqrt(np.dot(d, d) / d.size)
    return ScalingFunction("cDMA", 0, scales, values, name)
