"""Nyquist-rate reference estimate and error metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PsdEstimate
from .synth import NyquistSignal, ProcessSpec, autocorrelation


def welch_subbands(
    signal: NyquistSignal | np.ndarray, L: int, W: float | None = None, bins_per_band: int = 1
) -> PsdEstimate:
    """Averaged periodogram aggregated to the ``L`` subbands.

    Non-overlapping, rectangular-windowed segments of length
    ``L * bins_per_band``. With the default of one bin per band, DFT bin
    ``k`` is subband ``m = k (mod L)``. ``bins_per_band`` must be odd so
    that no bin straddles a subband edge.
    """
    if isinstance(signal, NyquistSignal):
        x, W = signal.samples, signal.rate_hz if W is None else W
    else:
        x, W = np.asarray(signal, dtype=float), 1.0 if W is None else W
    if bins_per_band < 1 or bins_per_band % 2 == 0:
        raise ValueError("bins_per_band must be a positive odd integer")
    seg = L * bins_per_band
    nseg = len(x) // seg
    if len(x) < 2 * L or nseg < 1:
        raise ValueError(f"signal of length {len(x)} too short for L = {L}")
    X = np.fft.fft(x[: nseg * seg].reshape(nseg, seg), axis=1)
    bin_power = np.mean(np.abs(X) ** 2, axis=0) / seg**2
    # signed bin index -> subband index m in -L/2+1..L/2
    k = np.fft.fftfreq(seg, d=1.0 / seg).astype(int)
    m = np.floor(k / bins_per_band + 0.5).astype(int)
    m[m <= -L // 2] += L
    v = np.zeros(L)
    np.add.at(v, m + L // 2 - 1, bin_power)
    return PsdEstimate(v, W, L)


def expected_welch_subbands(spec: ProcessSpec, L: int) -> PsdEstimate:
    """Expectation of ``welch_subbands`` (one bin per band) for a known process.

    ``E |X_k|^2 / L^2 = (1/L) sum_{|t|<L} (1 - |t|/L) r(t) exp(-j 2 pi k t / L)``:
    the subband powers smeared by the rectangular window's Fejer kernel.
    """
    t = np.arange(-(L - 1), L)
    r = autocorrelation(spec, t) * (1 - np.abs(t) / L)
    m = np.arange(L) - L // 2 + 1
    v = (np.exp(-2j * np.pi * np.outer(m, t) / L) @ r).real / L
    return PsdEstimate(v, spec.W, L)


@dataclass(frozen=True)
class ErrorMetrics:
    nse: float
    max_abs_error: float
    total_power_error: float


def metrics(estimate, reference) -> ErrorMetrics:
    """Normalized squared error, max abs error and relative total-power error."""
    est = np.asarray(getattr(estimate, "values", estimate), dtype=float)
    ref = np.asarray(getattr(reference, "values", reference), dtype=float)
    if est.shape != ref.shape:
        raise ValueError(f"length mismatch: {est.shape} vs {ref.shape}")
    err = est - ref
    ref_sq = float(ref @ ref)
    nse = float(err @ err) / ref_sq if ref_sq > 0 else (0.0 if not err.any() else np.inf)
    tot = abs(est.sum() - ref.sum()) / abs(ref.sum()) if ref.sum() else abs(est.sum())
    return ErrorMetrics(nse, float(np.max(np.abs(err))), float(tot))
