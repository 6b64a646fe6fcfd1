"""Domain types and the measurement-matrix construction.

A multi-coset sampler with period ``L`` and ``q`` channel offsets observes the
cross-correlations of its (fractionally delayed) channels.  At lag zero these
correlations are linear in the average powers of the ``L`` subbands of width
``W/L``::

    u_i = sum_l exp(-j 2 pi (c_a - c_b)_i m_l / L) v_l,   m_l = -L/2 + 1 + l

This module builds that linear map, both in complex form (``psi``) and in the
real/imaginary stacked form (``psi_tilde``) used by the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import MissingDifference, PatternError


@dataclass(frozen=True)
class SamplingPattern:
    """Multi-coset sampling pattern.

    Parameters
    ----------
    L : int
        Period of the pattern in Nyquist samples. Must be even and positive.
    offsets : sequence of int
        Distinct channel offsets in ``[0, L)``. Stored sorted.
    """

    L: int
    offsets: tuple[int, ...]

    def __post_init__(self):
        L = self.L
        if isinstance(L, bool) or int(L) != L:
            raise PatternError(f"L must be an integer, got {L!r}")
        L = int(L)
        if L <= 0 or L % 2:
            raise PatternError(f"L must be a positive even integer, got {L}")
        offsets = [int(c) for c in self.offsets]
        if len(offsets) < 2:
            raise PatternError("a pattern needs at least q = 2 channels")
        if len(set(offsets)) != len(offsets):
            raise PatternError(f"duplicate offsets in {offsets}")
        if min(offsets) < 0 or max(offsets) >= L:
            raise PatternError(f"offsets must lie in [0, {L}), got {offsets}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "offsets", tuple(sorted(offsets)))

    @property
    def q(self) -> int:
        return len(self.offsets)

    @property
    def rows(self) -> int:
        """Number of rows of the stacked system, ``q(q-1)+1``."""
        return self.q * (self.q - 1) + 1

    def rate(self, W: float) -> float:
        """Average sampling rate ``qW/L`` in Hz."""
        return self.q * W / self.L

    def differences(self) -> np.ndarray:
        """Absolute pairwise differences ``|c_a - c_b|`` for ``a < b``."""
        c = np.asarray(self.offsets)
        a, b = np.triu_indices(len(c), k=1)
        return np.abs(c[a] - c[b])

    def difference_set(self) -> set[int]:
        """Distinct differences, including the zero of the equal-channel entry."""
        return {0} | set(self.differences().tolist())


@dataclass(frozen=True)
class PairOrdering:
    """Row ordering shared by the correlation vector and the measurement matrix.

    Entry 0 is the single equal-channel row. Entries ``1..`` are the pairs
    ``(a, b)`` with ``a < b`` in lexicographic order; ``pairs[0]`` is ``None``.
    """

    pairs: tuple[Optional[tuple[int, int]], ...]
    differences: np.ndarray = field(repr=False)

    @classmethod
    def from_pattern(cls, pattern: SamplingPattern) -> "PairOrdering":
        q = pattern.q
        pairs: list[Optional[tuple[int, int]]] = [None]
        diffs = [0]
        for a in range(q):
            for b in range(a + 1, q):
                pairs.append((a, b))
                diffs.append(pattern.offsets[a] - pattern.offsets[b])
        d = np.array(diffs, dtype=int)
        d.setflags(write=False)
        return cls(tuple(pairs), d)

    def __len__(self) -> int:
        return len(self.pairs)

    def channel_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Channel index arrays ``(a, b)`` for the non-equal entries."""
        ab = np.array(self.pairs[1:], dtype=int).reshape(-1, 2)
        return ab[:, 0], ab[:, 1]


def subband_indices(L: int) -> np.ndarray:
    """Subband indices ``m_l = -L/2 + 1 + l`` for ``l = 0..L-1``."""
    return np.arange(L) - L // 2 + 1


@dataclass(frozen=True)
class MeasurementSystem:
    pattern: SamplingPattern
    ordering: PairOrdering
    psi: np.ndarray = field(repr=False)
    psi_tilde: np.ndarray = field(repr=False)

    @property
    def L(self) -> int:
        return self.pattern.L

    def stack(self, u: np.ndarray) -> np.ndarray:
        """Stack a complex pair-ordered vector as ``[Re(u); Im(u)[1:]]``."""
        u = np.asarray(u)
        return np.concatenate([u.real, u.imag[1:]])


def build_measurement_system(pattern: SamplingPattern) -> MeasurementSystem:
    """Build ``psi`` and its real-stacked form for a sampling pattern.

    The stacked matrix drops the imaginary part of the equal-channel row,
    which is identically zero, leaving exactly ``q(q-1)+1`` rows.
    """
    ordering = PairOrdering.from_pattern(pattern)
    L = pattern.L
    m = subband_indices(L)
    # reduce the phase index mod L before scaling to keep the exponent exact
    phase = np.mod(np.outer(ordering.differences, m), L)
    psi = np.exp(-2j * np.pi * phase / L)
    psi[0, :] = 1.0
    psi_tilde = np.vstack([psi.real, psi.imag[1:]])
    psi.setflags(write=False)
    psi_tilde.setflags(write=False)
    return MeasurementSystem(pattern, ordering, psi, psi_tilde)


def build_partial_dft_a(pattern: SamplingPattern, s: int) -> np.ndarray:
    """Partial-DFT matrix for non-negative sparse recovery, assembled from psi.

    Row ``2t`` holds ``cos(2 pi t n / L)`` and row ``2t+1`` holds
    ``sin(2 pi t n / L)`` for ``t = 0..s-1``, with columns indexed by
    ``n = 0..L-1``. Each row is taken from the psi row whose difference is
    ``+-t``; column ``l`` of psi maps to column ``n = m_l mod L``.

    Raises
    ------
    MissingDifference
        If some ``t < s`` is not a difference of the pattern.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    system = build_measurement_system(pattern)
    diffs = system.ordering.differences
    L = pattern.L
    n_of_l = np.mod(subband_indices(L), L)

    A = np.empty((2 * s, L))
    for t in range(s):
        hits = np.flatnonzero(np.abs(diffs) == t)
        if hits.size == 0:
            raise MissingDifference(t)
        i = hits[0]
        row = system.psi[i]
        sign = 1.0 if diffs[i] >= 0 else -1.0
        A[2 * t, n_of_l] = row.real
        A[2 * t + 1, n_of_l] = -sign * row.imag
    return A


def subband_bounds(l: int, L: int, W: float) -> tuple[float, float]:
    """Frequency edges ``[(2m-1)W/2L, (2m+1)W/2L]`` in Hz of column ``l``."""
    if not 0 <= l < L:
        raise IndexError(f"column index {l} outside [0, {L})")
    m = l - L // 2 + 1
    return (2 * m - 1) * W / (2 * L), (2 * m + 1) * W / (2 * L)


@dataclass(frozen=True)
class PsdEstimate:
    """Per-subband average powers at resolution ``W/L``.

    ``values[l]`` is the power in subband ``m_l``; the piecewise-constant
    density over that band has height ``(L/W) * values[l]``.
    """

    values: np.ndarray
    W: float
    L: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.L,):
            raise ValueError(f"expected {self.L} subband values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def resolution_hz(self) -> float:
        return self.W / self.L

    @property
    def m(self) -> np.ndarray:
        return subband_indices(self.L)

    def bounds(self) -> np.ndarray:
        """``(L, 2)`` array of subband edges in Hz."""
        m = self.m
        return np.column_stack(
            [(2 * m - 1) * self.W / (2 * self.L), (2 * m + 1) * self.W / (2 * self.L)]
        )

    def density(self) -> np.ndarray:
        """Heights of the piecewise-constant PSD approximation (power/Hz)."""
        return self.values * self.L / self.W

    def total_power(self) -> float:
        return float(self.values.sum())


def _min_q(rows_needed: int) -> int:
    q = 2
    while q * (q - 1) + 1 < rows_needed:
        q += 1
    return q


@dataclass(frozen=True)
class TradeoffReport:
    L: int
    q: int
    s: Optional[int]
    W: float
    min_q_noncompressive: int
    min_q_compressive: Optional[int]
    avg_rate_hz: float
    resolution_hz: float
    regime: str


def tradeoff(
    L: int, W: float, s: Optional[int] = None, q: Optional[int] = None
) -> TradeoffReport:
    """Channel-count arithmetic relating resolution, sparsity and rate.

    ``q`` defaults to the smallest channel count that admits an estimate:
    the compressive minimum when ``s`` is given, else the noncompressive one.
    """
    if L <= 0 or L % 2:
        raise PatternError(f"L must be a positive even integer, got {L}")
    if s is not None and not 1 <= s <= L:
        raise ValueError(f"sparsity s must lie in [1, L], got {s}")
    q_nc = _min_q(L)
    q_c = _min_q(2 * s) if s is not None else None
    if q is None:
        q = q_c if q_c is not None else q_nc
    regime = "overdetermined" if q * (q - 1) + 1 >= L else "underdetermined"
    return TradeoffReport(
        L=L,
        q=q,
        s=s,
        W=W,
        min_q_noncompressive=q_nc,
        min_q_compressive=q_c,
        avg_rate_hz=q * W / L,
        resolution_hz=W / L,
        regime=regime,
    )
