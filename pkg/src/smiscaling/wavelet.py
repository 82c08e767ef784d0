"""Derivative-of-Gaussian continuous wavelet transform and scalegrams."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e
from scipy import signal
from scipy.special import gamma

from .detrended import ScalingFunction
from .series import ReturnSeries

__all__ = [
    "WaveletSpec",
    "WaveletField",
    "dog_mother",
    "dog_kernel",
    "wavelet_scales",
    "cwt",
    "scalegram",
    "rescale_scalegram",
    "dog_fourier_factor",
    "period_to_scale",
]

# kernel-length x series-length above which "auto" switches to FFT convolution
_DIRECT_LIMIT = 4_000_000


@dataclass(frozen=True)
class WaveletSpec:
    """DOG wavelet of a given order, truncated at ``support_halfwidth`` scales."""

    order: int = 1
    support_halfwidth: float = 8.0
    family: str = "DOG"

    def __post_init__(self) -> None:
        if self.family != "DOG":
            raise ValueError("only the DOG family is supported")
        if self.order < 1:
            raise ValueError("DOG order must be >= 1")
        if self.support_halfwidth < 4:
            raise ValueError("support_halfwidth must be >= 4")


@dataclass(frozen=True, eq=False)
class WaveletField:
    """Wavelet coefficients W(a, b), one row per scale."""

    scales: np.ndarray
    translations: np.ndarray
    coefficients: np.ndarray
    spec: WaveletSpec = WaveletSpec()
    series_name: str = "series"

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (len(self.scales), len(self.translations)):
            raise ValueError("coefficient matrix does not match scales x translations")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("wavelet coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)


def dog_fourier_factor(order: int) -> float:
    """Equivalent Fourier period per unit scale, ``2 pi / sqrt(m + 1/2)``."""
    return 2.0 * math.pi / math.sqrt(order + 0.5)


def period_to_scale(period, order: int):
    """DOG scale whose spectral peak sits at ``period`` samples.

    Fit ranges quoted in days are mapped through this before a scalegram fit,
    so that wavelet and fluctuation exponents probe the same time scales.
    """
    return np.asarray(period, dtype=float) / dog_fourier_factor(order)


def dog_mother(order: int, eta):
    """DOG mother wavelet of order ``m``.

    ``psi(eta) = (-1)^(m+1) / sqrt(Gamma(m + 1/2)) * d^m/deta^m exp(-eta^2/2)``,
    evaluated through probabilists' Hermite polynomials, since the m-th
    derivative of the Gaussian is ``(-1)^m He_m(eta) exp(-eta^2/2)``.
    """
    if order < 1:
        raise ValueError("DOG order must be >= 1")
    eta = np.asarray(eta, dtype=float)
    coef = np.zeros(order + 1)
    coef[order] = 1.0
    he = hermite_e.hermeval(eta, coef)
    out = -he * np.exp(-0.5 * eta * eta) / math.sqrt(gamma(order + 0.5))
    return out if out.ndim else float(out)


def dog_kernel(spec: WaveletSpec, scale: float) -> np.ndarray:
    """Sampled ``psi((k - b) / a) / sqrt(a)`` for ``|k - b| <= support * a``."""
    half = int(math.floor(spec.support_halfwidth * scale))
    lags = np.arange(-half, half + 1, dtype=float)
    return dog_mother(spec.order, lags / scale) / math.sqrt(scale)


def wavelet_scales(min_scale: float, max_scale: float,
                   voices_per_octave: int = 16) -> np.ndarray:
    """Log-spaced real scales, ``voices_per_octave`` per doubling."""
    if min_scale <= 0 or max_scale < min_scale:
        raise ValueError("need 0 < min_scale <= max_scale")
    n_oct = math.log2(max_scale / min_scale)
    count = int(math.floor(n_oct * voices_per_octave + 1e-9)) + 1
    return min_scale * 2.0 ** (np.arange(count) / voices_per_octave)


def cwt(returns, spec: WaveletSpec = WaveletSpec(), scales=None,
        method: str = "auto") -> WaveletField:
    """Continuous wavelet transform by correlation with sampled DOG kernels.

    ``W(a, b) = sum_k R(k) psi((k - b) / a) / sqrt(a)`` for every integer
    ``b`` in ``0 .. N-1``; samples outside the series count as zero.
    ``method`` selects ``"direct"`` summation, ``"fft"`` convolution or
    ``"auto"`` (direct for short kernels).
    """
    if isinstance(returns, ReturnSeries):
        r, name = returns.values, returns.source_name
    else:
        r, name = np.asarray(returns, dtype=float), "series"
    if scales is None:
        raise ValueError("scales are required")
    scales = np.atleast_1d(np.asarray(scales, dtype=float))
    if scales.size == 0:
        raise ValueError("empty scale list")
    if np.any(scales <= 0):
        raise ValueError("wavelet scales must be positive")
    if r.size == 0:
        raise ValueError("empty series")
    size = r.size
    coeffs = np.empty((scales.size, size))
    for i, a in enumerate(scales):
        kernel = dog_kernel(spec, float(a))
        half = (kernel.size - 1) // 2
        padded = np.concatenate((np.zeros(half), r, np.zeros(half)))
        route = method
        if route == "auto":
            route = "direct" if kernel.size * size <= _DIRECT_LIMIT else "fft"
        if route == "direct":
            coeffs[i] = np.convolve(padded, kernel[::-1], mode="valid")
        elif route == "fft":
            coeffs[i] = signal.fftconvolve(padded, kernel[::-1], mode="valid")
        else:
            raise ValueError(f"unknown method {method!r}")
    return WaveletField(scales, np.arange(size), coeffs, spec, name)


def scalegram(field: WaveletField, exclude_coi: bool = False) -> ScalingFunction:
    """Wavelet power summed over translations, ``E_W(a) = sum_b W(a, b)^2``.

    With ``exclude_coi`` the translations within ``support * a`` of either
    end of the series are left out.
    """
    if field.coefficients.size == 0:
        raise ValueError("empty wavelet field")
    power = field.coefficients ** 2
    if exclude_coi:
        b = np.asarray(field.translations, dtype=float)
        first, last = b[0], b[-1]
        values = np.empty(len(field.scales))
        for i, a in enumerate(field.scales):
            reach = field.spec.support_halfwidth * a
            keep = (b - first >= reach) & (last - b >= reach)
            values[i] = power[i, keep].sum() if keep.any() else 0.0
    else:
        values = power.sum(axis=1)
    return ScalingFunction("scalegram", field.spec.order,
                           np.asarray(field.scales, dtype=float), values,
                           field.series_name)


def rescale_scalegram(sg: ScalingFunction) -> ScalingFunction:
    """``G(a) = sqrt(a E_W(a))``, whose log-log slope is ``(beta + 1) / 2``."""
    if sg.method != "scalegram":
        raise ValueError(f"expected a scalegram, got {sg.method}")
    if np.any(sg.values <= 0):
        raise ValueError("scalegram has zero or negative power (degenerate input?)")
    return ScalingFunction("rescaled-scalegram", sg.order, sg.scales,
                           np.sqrt(sg.scales * sg.values), sg.series_name)
