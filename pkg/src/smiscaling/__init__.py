"""Scaling analysis of daily price series.

DFA and centered DMA fluctuation functions, derivative-of-Gaussian wavelet
scalegrams, power-law fits, periodic-trend detection and sliding-window
Hurst exponents.
"""
from .cycles import CycleReport, DetectedPeriod, detect_cycles
from .detrended import ScaleGrid, ScalingFunction, dfa_fluctuation, dma_fluctuation
from .fitting import ExponentFit, alpha_to_beta, beta_to_alpha, detect_crossovers, fit_exponent
from .rolling import HurstTrack, TdConfig, mean_local_hurst, td_dma
from .series import PriceSeries, Profile, ReturnSeries, log_returns, profile
from .synth import SynthSpec, generate
from .wavelet import (WaveletField, WaveletSpec, cwt, dog_mother, period_to_scale,
                      rescale_scalegram,
                      scalegram, wavelet_scales)

__version__ = "0.1.0"
