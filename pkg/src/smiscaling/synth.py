"""Seeded synthetic return series with known scaling.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``: Gaussian
draws use ``standard_normal`` and phases use ``random`` (53-bit doubles in
[0, 1)). The stream is fixed for a given numpy major version.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .series import PriceSeries, ReturnSeries

__all__ = [
    "SynthSpec",
    "generate",
    "white_noise",
    "spectral_fgn",
    "to_prices",
    "autocorrelation",
    "autocorrelation_hurst",
]

KINDS = ("white", "fgn", "sinusoid_plus_noise")


@dataclass(frozen=True)
class SynthSpec:
    kind: str = "white"
    length: int = 10_000
    seed: int = 0
    h_target: float = 0.5
    period: float = 90.0
    amplitude_ratio: float = 2.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.length < 64:
            raise ValueError("length must be >= 64")
        if self.kind == "fgn" and not 0.0 < self.h_target < 1.0:
            raise ValueError("h_target must lie in (0, 1)")
        if self.kind == "sinusoid_plus_noise":
            if self.period <= 0:
                raise ValueError("period must be positive")
            if self.amplitude_ratio < 0:
                raise ValueError("amplitude_ratio must be non-negative")

    @property
    def label(self) -> str:
        if self.kind == "fgn":
            return f"fgn_h{self.h_target:.2f}_s{self.seed}"
        if self.kind == "sinusoid_plus_noise":
            return f"sine_t{self.period:g}_a{self.amplitude_ratio:g}_s{self.seed}"
        return f"white_s{self.seed}"


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def white_noise(length: int, seed: int) -> np.ndarray:
    return _rng(seed).standard_normal(length)


def spectral_fgn(length: int, hurst: float, seed: int) -> np.ndarray:
    """Power-law noise with spectrum ``f^-(2H - 1)`` by random-phase synthesis.

    Amplitudes ``f^-(beta/2)`` on the one-sided frequency grid, zero at
    ``f = 0``, uniformly random phases, then an inverse real FFT. The output
    is scaled to unit standard deviation.
    """
    beta = 2.0 * hurst - 1.0
    freqs = np.arange(length // 2 + 1, dtype=float)
    amp = np.zeros_like(freqs)
    amp[1:] = freqs[1:] ** (-beta / 2.0)
    phases = 2.0 * math.pi * _rng(seed).random(freqs.size)
    spectrum = amp * np.exp(1j * phases)
    if length % 2 == 0:
        # the Nyquist bin of a real signal is real
        spectrum[-1] = amp[-1] * math.cos(phases[-1])
    x = np.fft.irfft(spectrum, n=length)
    return x / x.std()


def generate(spec: SynthSpec) -> ReturnSeries:
    """Draw the series described by ``spec``; identical specs give identical output."""
    if spec.kind == "white":
        values = white_noise(spec.length, spec.seed)
    elif spec.kind == "fgn":
        values = spectral_fgn(spec.length, spec.h_target, spec.seed)
    else:
        noise = white_noise(spec.length, spec.seed)
        k = np.arange(spec.length)
        # nominal noise std is 1
        values = noise + spec.amplitude_ratio * np.sin(2.0 * math.pi * k / spec.period)
    return ReturnSeries(values, source_name=spec.label)


def to_prices(returns: ReturnSeries, start_price: float = 100.0,
              start: dt.date = dt.date(2000, 1, 3), scale: float = 0.01,
              name: str | None = None) -> PriceSeries:
    """Prices ``start_price * exp(cumsum(scale * R))`` on consecutive days.

    ``scale`` keeps the synthetic daily moves in a market-like range; it does
    not change any fitted exponent.
    """
    logp = math.log(start_price) + np.concatenate(
        ([0.0], np.cumsum(scale * returns.values)))
    return PriceSeries.from_closes(np.exp(logp), name=name or returns.source_name,
                                   start=start)


def autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation for lags ``0 .. max_lag``."""
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    n = x.size
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[:max_lag + 1] / n
    return acov / acov[0]


def autocorrelation_hurst(acf: np.ndarray, lag_min: int = 2,
                          lag_max: int = 50) -> float:
    """Hurst exponent from the decay ``r(tau) ~ tau^(2H - 2)``.

    Fits a line to ``log r`` against ``log tau`` over the lags with positive
    correlation and returns ``1 + slope / 2``. Meaningful for ``H > 1/2``.
    """
    lags = np.arange(lag_min, lag_max + 1)
    r = np.asarray(acf)[lags]
    keep = r > 0
    if keep.sum() < 3:
        raise ValueError("too few positive autocorrelations to fit")
    slope = np.polyfit(np.log(lags[keep]), np.log(r[keep]), 1)[0]
    return 1.0 + slope / 2.0
