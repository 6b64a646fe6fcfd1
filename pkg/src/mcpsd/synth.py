"""Test processes on the Nyquist grid and their exact subband powers.

Every process is zero-mean white Gaussian noise passed through an FIR filter,
optionally plus cosines with independent uniform phases. Its PSD is therefore
``variance * |H(e^{j theta})|^2`` plus spectral lines, and the power in any
band follows in closed form from the filter's autocorrelation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import signal as sps

from .core import PsdEstimate, subband_indices

KINDS = ("ma_lines", "sparse_multiband", "notched", "white")

# taps for the band-pass / band-stop designs
DEFAULT_NUMTAPS = 1025
DEFAULT_WINDOW = "blackman"


@dataclass(frozen=True)
class ProcessSpec:
    """Generative description of a real, zero-mean WSS test process.

    Attributes
    ----------
    kind : {"ma_lines", "sparse_multiband", "notched", "white"}
    W : float
        Nyquist rate in Hz; the process lives on the grid ``T = 1/W``.
    variance : float
        Variance of the white noise driving the filter.
    fir : tuple of float
        MA filter taps (``ma_lines`` only).
    lines : tuple of (amplitude, omega)
        Cosines ``A cos(omega k + phi)`` with ``omega`` in rad/sample, ``0 < omega < pi``.
    bands : tuple of (center_hz, width_hz)
        Active bands (``sparse_multiband``) or stop bands (``notched``),
        positive frequencies only.
    numtaps, window :
        Windowed-sinc design parameters for band processes.
    """

    kind: str
    W: float = 1.0
    variance: float = 1.0
    fir: tuple[float, ...] = ()
    lines: tuple[tuple[float, float], ...] = ()
    bands: tuple[tuple[float, float], ...] = ()
    numtaps: int = DEFAULT_NUMTAPS
    window: str = DEFAULT_WINDOW
    _taps: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}; expected one of {KINDS}")
        if self.W <= 0 or self.variance < 0:
            raise ValueError("W must be positive and variance non-negative")
        object.__setattr__(self, "fir", tuple(float(h) for h in self.fir))
        object.__setattr__(self, "lines", tuple((float(a), float(w)) for a, w in self.lines))
        object.__setattr__(self, "bands", tuple((float(c), float(b)) for c, b in self.bands))
        for _, w in self.lines:
            if not 0 < w < np.pi:
                raise ValueError(f"line frequency {w} outside (0, pi)")
        for c, b in self.bands:
            lo, hi = c - b / 2, c + b / 2
            if b <= 0 or lo <= 0 or hi >= self.W / 2:
                raise ValueError(
                    f"band ({c}, {b}) must satisfy 0 < edges < W/2 = {self.W / 2}"
                )
        if self.kind in ("sparse_multiband", "notched"):
            if not self.bands:
                raise ValueError(f"{self.kind} process needs at least one band")
            if self.numtaps % 2 == 0:
                raise ValueError("numtaps must be odd")
        if self.kind == "ma_lines" and not self.fir:
            raise ValueError("ma_lines process needs FIR taps")
        object.__setattr__(self, "_taps", _design_taps(self))

    @classmethod
    def ma_with_lines(cls, fir, lines, variance=1.0, W=1.0) -> "ProcessSpec":
        return cls("ma_lines", W=W, variance=variance, fir=tuple(fir), lines=tuple(lines))

    @classmethod
    def sparse_multiband(cls, W, bands, variance=1.0, **kw) -> "ProcessSpec":
        return cls("sparse_multiband", W=W, variance=variance, bands=tuple(bands), **kw)

    @classmethod
    def notched(cls, W, stop_bands, variance=1.0, **kw) -> "ProcessSpec":
        return cls("notched", W=W, variance=variance, bands=tuple(stop_bands), **kw)

    @classmethod
    def white(cls, variance=1.0, W=1.0) -> "ProcessSpec":
        return cls("white", W=W, variance=variance)

    @property
    def taps(self) -> np.ndarray:
        """Impulse response applied to the driving white noise."""
        return self._taps

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_taps")
        d["fir"] = list(d["fir"])
        d["lines"] = [list(x) for x in d["lines"]]
        d["bands"] = [list(x) for x in d["bands"]]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProcessSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, **d)

    def total_power(self) -> float:
        return self.variance * float(np.sum(self.taps**2)) + sum(a * a / 2 for a, _ in self.lines)


def _design_taps(spec: ProcessSpec) -> np.ndarray:
    if spec.kind == "white":
        return np.ones(1)
    if spec.kind == "ma_lines":
        return np.asarray(spec.fir, dtype=float)
    edges = sorted((c - b / 2, c + b / 2) for c, b in spec.bands)
    if spec.kind == "sparse_multiband":
        h = np.zeros(spec.numtaps)
        for lo, hi in edges:
            h += sps.firwin(spec.numtaps, [lo, hi], pass_zero=False, window=spec.window, fs=spec.W)
        return h
    cutoffs = [f for pair in edges for f in pair]
    return sps.firwin(spec.numtaps, cutoffs, pass_zero=True, window=spec.window, fs=spec.W)


@dataclass(frozen=True)
class NyquistSignal:
    samples: np.ndarray
    rate_hz: float

    def __len__(self) -> int:
        return len(self.samples)


def generate(spec: ProcessSpec, length: int, seed) -> NyquistSignal:
    """One stationary realization of ``length`` Nyquist-rate samples.

    The filter is run in ``valid`` mode so no start-up transient is kept.
    Each line gets an independent uniform phase, which makes the sum WSS.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    h = spec.taps
    noise = rng.standard_normal(length + len(h) - 1) * np.sqrt(spec.variance)
    if len(h) == 1:
        x = h[0] * noise
    else:
        x = sps.oaconvolve(noise, h, mode="valid")
    if spec.lines:
        k = np.arange(length)
        for amp, omega in spec.lines:
            x = x + amp * np.cos(omega * k + rng.uniform(0, 2 * np.pi))
    return NyquistSignal(x, spec.W)


def _tap_autocorrelation(h: np.ndarray) -> np.ndarray:
    """``r(k) = sum_n h(n) h(n+k)`` for ``k = 0..len(h)-1``."""
    return np.correlate(h, h, mode="full")[len(h) - 1 :]


def autocorrelation(spec: ProcessSpec, lags) -> np.ndarray:
    """Exact ``r_xx(k) = E x(n+k) x(n)`` at integer Nyquist-grid lags."""
    lags = np.abs(np.asarray(lags, dtype=int))
    r_h = _tap_autocorrelation(spec.taps) * spec.variance
    out = np.where(lags < len(r_h), r_h[np.minimum(lags, len(r_h) - 1)], 0.0)
    for amp, omega in spec.lines:
        out = out + amp * amp / 2 * np.cos(omega * lags)
    return out


def band_power(spec: ProcessSpec, theta_lo, theta_hi) -> np.ndarray:
    """Continuous-spectrum power in ``[theta_lo, theta_hi]`` (rad/sample).

    Integrates ``sum_k r(k) e^{-j theta k}`` term by term, which is exact for
    a finite impulse response. Lines are not included.
    """
    theta_lo = np.asarray(theta_lo, dtype=float)
    theta_hi = np.asarray(theta_hi, dtype=float)
    r = _tap_autocorrelation(spec.taps) * spec.variance
    k = np.arange(1, len(r))
    p = r[0] * (theta_hi - theta_lo)
    if k.size:
        s = (np.sin(np.multiply.outer(theta_hi, k)) - np.sin(np.multiply.outer(theta_lo, k))) / k
        p = p + 2 * s @ r[1:]
    return p / (2 * np.pi)


def psd(spec: ProcessSpec, theta) -> np.ndarray:
    """Continuous part of the PSD, ``variance |H(e^{j theta})|^2``."""
    _, H = sps.freqz(spec.taps, worN=np.atleast_1d(np.asarray(theta, dtype=float)))
    return spec.variance * np.abs(H) ** 2


def line_subband(omega: float, L: int) -> int:
    """Subband index ``m`` containing normalized frequency ``omega``."""
    m = int(np.floor(omega * L / (2 * np.pi) + 0.5))
    # -L/2 and L/2 denote the same (wrapped) band
    return L // 2 if m == -L // 2 else m


def true_psd(spec: ProcessSpec, L: int, W: Optional[float] = None) -> PsdEstimate:
    """Exact average power in each of the ``L`` subbands.

    A cosine of amplitude ``A`` puts ``A^2/4`` into the subband containing
    ``+omega`` and ``A^2/4`` into the one containing ``-omega``.
    """
    W = spec.W if W is None else W
    m = subband_indices(L)
    v = band_power(spec, (2 * m - 1) * np.pi / L, (2 * m + 1) * np.pi / L)
    offset = L // 2 - 1
    for amp, omega in spec.lines:
        for sign in (1, -1):
            mm = line_subband(sign * omega, L)
            v[mm + offset] += amp * amp / 4
    return PsdEstimate(v, W, L)


def sparse_support(spec: ProcessSpec, L: int, rel_floor: float = 1e-3) -> np.ndarray:
    """Column indices whose true power exceeds ``rel_floor`` times the peak."""
    v = true_psd(spec, L).values
    return np.flatnonzero(v > rel_floor * v.max())
