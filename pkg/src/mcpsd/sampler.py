"""Multi-coset acquisition and fractional-delay post-processing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SamplingPattern
from .errors import InsufficientSignal
from .synth import NyquistSignal

DEFAULT_HALF_LENGTH = 64


@dataclass(frozen=True)
class CosetSampleSet:
    pattern: SamplingPattern
    y: np.ndarray  # (q, N); y[i, n] = x[n L + c_i]

    @property
    def N(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class DelayedSampleSet:
    pattern: SamplingPattern
    z: np.ndarray  # (q, M)
    guard: int
    delays: np.ndarray  # per-channel delay in channel samples

    @property
    def M(self) -> int:
        return self.z.shape[1]


def required_length(pattern: SamplingPattern, N: int, start: int = 0) -> int:
    return start + (N - 1) * pattern.L + max(pattern.offsets) + 1


def coset_sample(
    signal: NyquistSignal | np.ndarray, pattern: SamplingPattern, N: int, start: int = 0
) -> CosetSampleSet:
    """Take ``N`` samples per channel at Nyquist indices ``start + nL + c_i``."""
    x = signal.samples if isinstance(signal, NyquistSignal) else np.asarray(signal)
    if N < 1:
        raise ValueError("N must be >= 1")
    need = required_length(pattern, N, start)
    if len(x) < need:
        raise InsufficientSignal(need, len(x))
    idx = start + np.arange(N)[None, :] * pattern.L + np.asarray(pattern.offsets)[:, None]
    return CosetSampleSet(pattern, x[idx])


def fractional_delay_taps(delay: float, K: int = DEFAULT_HALF_LENGTH) -> np.ndarray:
    """Hann-windowed sinc approximating a delay of ``delay`` samples.

    Returns ``2K+1`` taps for lags ``k = -K..K``. The window is centred on the
    delay so the response stays close to linear phase. An integer delay
    ``|d| <= K`` yields an exact shifted impulse.
    """
    k = np.arange(-K, K + 1)
    t = k - delay
    w = 0.5 * (1 + np.cos(np.pi * t / (K + 1)))
    w[np.abs(t) >= K + 1] = 0.0
    h = np.sinc(t)
    # sin(pi k) is not exactly zero in floating point
    h[(t == np.round(t)) & (t != 0)] = 0.0
    return h * w


def channel_delays(pattern: SamplingPattern) -> np.ndarray:
    """Delay ``c_i / L`` of each channel, in channel-sample periods."""
    return np.asarray(pattern.offsets, dtype=float) / pattern.L


def fractional_delay(
    samples: CosetSampleSet, K: int = DEFAULT_HALF_LENGTH
) -> DelayedSampleSet:
    """Delay channel ``i`` by ``c_i/L`` channel periods and trim ``K`` edge samples.

    Only outputs whose filter support lies entirely inside the data are kept,
    so every channel returns the same ``N - 2K`` time indices.
    """
    N = samples.N
    if N <= 2 * K:
        raise ValueError(f"N = {N} samples cannot survive trimming {K} per side")
    delays = channel_delays(samples.pattern)
    z = np.empty((samples.y.shape[0], N - 2 * K))
    for i, d in enumerate(delays):
        z[i] = np.convolve(samples.y[i], fractional_delay_taps(d, K), mode="valid")
    return DelayedSampleSet(samples.pattern, z, K, delays)
