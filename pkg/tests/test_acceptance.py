"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v``; the summary at the end of the
session lists every criterion with the measured numbers.
"""
import filecmp
import functools
import os
import time
from pathlib import Path

import numpy as np
import pytest

import conftest
from oracles import cwt_coefficient, dfa_loop, dma_loop
from smiscaling.cycles import detect_cycles
from smiscaling.detrended import ScaleGrid, dfa_fluctuation, dma_fluctuation
from smiscaling.fitting import beta_to_alpha, detect_crossovers, fit_exponent
from smiscaling.io import read_prices, write_prices
from smiscaling.pipeline import RunConfig, analyze_returns, run_report
from smiscaling.rolling import td_dma
from smiscaling.series import ReturnSeries, log_returns
from smiscaling.synth import (
    SynthSpec,
    autocorrelation,
    autocorrelation_hurst,
    generate,
    spectral_fgn,
    to_prices,
    white_noise,
)
from smiscaling.wavelet import WaveletSpec, cwt, period_to_scale, scalegram, wavelet_scales

pytestmark = pytest.mark.slow

H_TARGETS = (0.3, 0.5, 0.7, 0.9)
SEEDS = range(20)


def record(key, ok, detail):
    conftest.ACCEPTANCE[key] = ("PASS" if ok else "FAIL", detail)
    assert ok, detail


def _three_exponents(r, lo, hi):
    """DFA2 alpha, cDMA H and (beta + 1)/2 from DOG1, all over [lo, hi] days."""
    alpha = fit_exponent(dfa_fluctuation(r, 2, ScaleGrid(lo, hi)), lo, hi).exponent
    hurst = fit_exponent(dma_fluctuation(r, ScaleGrid(lo, hi)), lo, hi).exponent
    a_lo, a_hi = period_to_scale([lo, hi], 1)
    sg = scalegram(cwt(r, WaveletSpec(1), wavelet_scales(a_lo, a_hi)))
    beta = fit_exponent(sg, a_lo, a_hi).exponent
    return alpha, hurst, beta_to_alpha(beta)


@functools.lru_cache(maxsize=None)
def _fgn_ensemble(h):
    rows, acfs = [], []
    for seed in SEEDS:
        r = spectral_fgn(16_384, h, seed)
        rows.append(_three_exponents(r, 10, 1024))
        acfs.append(autocorrelation(r, 20))
    return np.array(rows), np.mean(acfs, axis=0)


def test_criterion_1_white_noise_calibration():
    t0 = time.perf_counter()
    est = np.array([_three_exponents(white_noise(10_000, s), 10, 100) for s in SEEDS])
    elapsed = time.perf_counter() - t0
    means = est.mean(axis=0)
    worst = np.abs(est - 0.5).max(axis=0)
    ok = (np.all(np.abs(means - 0.5) <= 0.03) and np.all(worst <= 0.06) and elapsed < 60)
    record("1 white-noise calibration", ok,
           "means alpha/H/(beta+1)/2 = " + "/".join(f"{m:.3f}" for m in means)
           + ", worst per-seed deviation " + "/".join(f"{w:.3f}" for w in worst)
           + f", {elapsed:.1f} s")


def test_criterion_2_fgn_recovery():
    means, acf_h, problems = [], {}, []
    for h in H_TARGETS:
        est, acf = _fgn_ensemble(h)
        m = est[:, 0].mean()
        means.append(m)
        if abs(m - h) > 0.03:
            problems.append(f"alpha {m:.3f} for H={h}")
        if h > 0.5:
            acf_h[h] = autocorrelation_hurst(acf, 1, 20)
            if abs(acf_h[h] - h) > 0.07:
                problems.append(f"ACF H {acf_h[h]:.3f} for H={h}")
    if not np.all(np.diff(means) > 0):
        problems.append("ensemble means not strictly increasing")
    detail = ("mean alpha " + ", ".join(f"{h}:{m:.3f}" for h, m in zip(H_TARGETS, means))
              + "; ACF H " + ", ".join(f"{h}:{v:.3f}" for h, v in acf_h.items()))
    record("2 fGn exponent recovery", not problems,
           detail + ("; " + "; ".join(problems) if problems else ""))


def test_criterion_3_estimator_agreement():
    gap_h, gap_b = 0.0, 0.0
    for h in H_TARGETS:
        est, _ = _fgn_ensemble(h)
        gap_h = max(gap_h, np.abs(est[:, 0] - est[:, 1]).max())
        gap_b = max(gap_b, np.abs(est[:, 0] - est[:, 2]).max())
    record("3 estimator agreement", gap_h <= 0.05 and gap_b <= 0.08,
           f"max |alpha-H| {gap_h:.3f}, max |alpha-(beta+1)/2| {gap_b:.3f} over 80 series")


def test_criterion_4_brute_force_equivalence():
    rng = np.random.default_rng(2024)
    worst = {"dfa": 0.0, "dma": 0.0, "cwt_direct": 0.0, "cwt_fft": 0.0}
    for _ in range(50):
        n = int(rng.integers(16, 65))
        r = rng.standard_normal(n)
        for order in (1, 2):
            scales = np.arange(order + 2, n // 4 + 1)
            expected = np.array([dfa_loop(r, int(s), order) for s in scales])
            for method in ("direct", "fft", "auto"):
                got = dfa_fluctuation(r, order, scales=scales, method=method).values
                worst["dfa"] = max(worst["dfa"], np.max(np.abs(got / expected - 1)))
        odd = np.arange(3, n // 4 + 1, 2)
        got = dma_fluctuation(r, scales=odd).values
        expected = np.array([dma_loop(r, int(s)) for s in odd])
        worst["dma"] = max(worst["dma"], np.max(np.abs(got / expected - 1)))
        scales = [1.0, 1.7, float(n) / 8]
        for order in (1, 2):
            ref = np.array([[cwt_coefficient(r, a, b, order) for b in range(n)] for a in scales])
            # relative error; near-zero coefficients are measured against 1e-6 of the row peak
            norm = np.abs(ref).max(axis=1, keepdims=True)
            for method in ("direct", "fft"):
                got = cwt(r, WaveletSpec(order), scales, method=method).coefficients
                err = np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-6 * norm))
                key = f"cwt_{method}"
                worst[key] = max(worst[key], err)
    ok = (worst["dfa"] <= 1e-10 and worst["dma"] <= 1e-10
          and worst["cwt_direct"] <= 1e-10 and worst["cwt_fft"] <= 1e-6)
    record("4 brute-force equivalence", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def _cycle_scan(r):
    scales = wavelet_scales(period_to_scale(10, 1), len(r) / 20)
    high = scalegram(cwt(r, WaveletSpec(10), scales))
    low = scalegram(cwt(r, WaveletSpec(1), scales))
    return detect_cycles(high, low, prominence_threshold=3.0, min_prominence=0.6)


def test_criterion_5_cycle_detection():
    hits, crossed, magnified = 0, 0, True
    for seed in SEEDS:
        r = generate(SynthSpec("sinusoid_plus_noise", 10_000, seed, period=90,
                               amplitude_ratio=2.0)).values
        found = _cycle_scan(r).detected_periods
        if len(found) == 1 and 70 <= found[0].period <= 115:
            hits += 1
        magnified &= all(p.prominence > p.low_order_prominence for p in found)
        crossovers = detect_crossovers(dfa_fluctuation(r, 2, ScaleGrid(4, 2500)))
        crossed += len(crossovers) >= 2
    false_alarms = sum(len(_cycle_scan(white_noise(10_000, 10_000 + s)).detected_periods)
                       for s in range(100))
    ok = hits >= 18 and false_alarms == 0 and magnified and crossed >= 18
    record("5 cycle detection", ok,
           f"{hits}/20 single period in [70,115], {false_alarms} detections on 100 white "
           f"seeds, DOG10 > DOG1 prominence: {magnified}, >=2 crossovers in {crossed}/20")


def test_criterion_6_tddma_consistency():
    r = spectral_fgn(8192, 0.7, 0)
    track = td_dma(r)
    full = fit_exponent(dma_fluctuation(r, ScaleGrid(3, 2048)), 10, 500).exponent
    two = np.concatenate([spectral_fgn(4096, 0.3, 1), spectral_fgn(4096, 0.8, 2)])
    t2 = td_dma(two)
    window = t2.config.window_size
    first = np.nanmean(t2.local_h[t2.positions < 4096])
    second = np.nanmean(t2.local_h[t2.positions - window + 1 >= 4096])
    ok = abs(track.mean_h - full) <= 0.05 and second - first >= 0.3
    record("6 tdDMA consistency", ok,
           f"<H> {track.mean_h:.3f} vs H {full:.3f}; regimes {first:.3f} -> {second:.3f}")


OFFICIAL = {
    # label: (fit range, alpha, H, beta)
    "BELEXline": ((10, 170), 0.72, 0.73, 0.46),
    "CROBEX": ((10, 300), 0.52, 0.56, 0.18),
    "CAC40": ((10, 500), 0.44, 0.48, -0.04),
}


def test_criterion_7_official_data():
    root = os.environ.get("SMISCALING_OFFICIAL_DATA")
    if not root:
        conftest.ACCEPTANCE["7 official index rows"] = (
            "WAIVED", "set SMISCALING_OFFICIAL_DATA to a directory with BELEXline.csv, "
                      "CROBEX.csv and CAC40.csv to run")
        pytest.skip("official closing prices not supplied")
    misses, detail = [], []
    for label, ((lo, hi), alpha, hurst, beta) in OFFICIAL.items():
        path = Path(root) / f"{label}.csv"
        if not path.is_file():
            misses.append(f"{label}: missing")
            continue
        returns = ReturnSeries(log_returns(read_prices(path, label)).values, label)
        a = analyze_returns(returns, RunConfig(fit_min=lo, fit_max=hi))
        got = (a.dfa_fit.exponent, a.dma_fit.exponent, a.beta_fit.exponent)
        detail.append(f"{label} " + "/".join(f"{g:.2f}" for g in got))
        for name, g, want in zip(("alpha", "H", "beta"), got, (alpha, hurst, beta)):
            if abs(g - want) > 0.05:
                misses.append(f"{label} {name} {g:.2f} vs {want:.2f}")
    record("7 official index rows", not misses, "; ".join(detail + misses))


def test_criterion_8_determinism(tmp_path):
    inputs = []
    for spec in (SynthSpec("fgn", 3000, 4, h_target=0.7),
                 SynthSpec("sinusoid_plus_noise", 3000, 5)):
        path = tmp_path / f"{spec.label}.csv"
        write_prices(path, to_prices(generate(spec)))
        inputs.append((str(path), spec.label))
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        run_report(RunConfig(inputs=tuple(inputs), out_dir=str(out)))
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    same = names == sorted(p.name for p in outs[1].iterdir())
    _, mismatch, errors = filecmp.cmpfiles(outs[0], outs[1], names, shallow=False)
    ok = same and not mismatch and not errors and len(names) > 2
    record("8 pipeline determinism", ok,
           f"{len(names)} files compared, {len(mismatch) + len(errors)} differ")
