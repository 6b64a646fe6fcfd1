"""Correlation assembly, LS / NNLS solvers and finite-sample diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import MeasurementSystem, PairOrdering, PsdEstimate, SamplingPattern
from .errors import MaxIterationsExceeded, RankDeficient
from .patterns import diagnose
from .sampler import DelayedSampleSet


@dataclass(frozen=True)
class CorrelationVector:
    """Lag-zero sample correlations in pair order.

    ``raw`` holds one (real-valued, complex-typed) entry per row of ``psi``;
    ``u`` is the stacked form matching ``psi_tilde``.
    """

    raw: np.ndarray
    u: np.ndarray
    M: int

    @classmethod
    def from_raw(cls, raw, M: int = 0) -> "CorrelationVector":
        raw = np.asarray(raw, dtype=complex)
        return cls(raw, np.concatenate([raw.real, raw.imag[1:]]), M)

    @classmethod
    def from_stacked(cls, u) -> "CorrelationVector":
        u = np.asarray(u, dtype=float)
        n = (len(u) + 1) // 2
        raw = u[:n] + 1j * np.concatenate([[0.0], u[n:]])
        return cls(raw, u, 0)


def sample_correlation_matrix(z: np.ndarray) -> np.ndarray:
    """``S = (1/M) sum_n z(n) z(n)^T`` over the ``M`` columns of ``z``."""
    return z @ z.T / z.shape[1]


def assemble_u(delayed: DelayedSampleSet, ordering: PairOrdering) -> CorrelationVector:
    """Empirical correlation vector from delayed channels.

    Pair entries are ``(1/M) sum_n z_a(n) z_b(n)``; the equal-channel entry is
    the mean of the ``q`` channel powers.
    """
    z = delayed.z
    if z.shape[1] < 2:
        raise ValueError("need at least two samples per channel")
    S = sample_correlation_matrix(z)
    a, b = ordering.channel_indices()
    raw = np.concatenate([[np.trace(S) / len(S)], S[a, b]])
    return CorrelationVector.from_raw(raw, z.shape[1])


@dataclass(frozen=True)
class SolverReport:
    estimate: PsdEstimate
    method: str
    residual_norm: float
    iterations: int = 0
    active_set_size: int = 0


def _report(system, u, x, method, W, iterations=0, active=0) -> SolverReport:
    res = float(np.linalg.norm(system.psi_tilde @ x - u))
    return SolverReport(PsdEstimate(x, W, system.L), method, res, iterations, active)


def solve_ls(
    system: MeasurementSystem, u: CorrelationVector, W: float = 1.0
) -> SolverReport:
    """Noncompressive estimate: unique least-squares solution of the stacked system.

    Raises ``RankDeficient`` unless ``psi_tilde`` has full column rank. The
    solution may contain negative entries; no clipping is applied.
    """
    diag = diagnose(system.pattern)
    if not diag.full_rank:
        raise RankDeficient(diag.rank, system.L)
    if not np.any(u.u):
        return _report(system, u.u, np.zeros(system.L), "LS", W)
    x, *_ = np.linalg.lstsq(system.psi_tilde, u.u, rcond=None)
    return _report(system, u.u, x, "LS", W)


def nnls(
    A: np.ndarray,
    b: np.ndarray,
    max_iter: Optional[int] = None,
    dual_tol: Optional[float] = None,
) -> tuple[np.ndarray, int]:
    """Lawson-Hanson active-set solver for ``min ||Ax - b||, x >= 0``.

    Returns the solution and the number of iterations (outer admissions plus
    inner feasibility corrections).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    max_iter = 10 * n if max_iter is None else max_iter
    Atb = A.T @ b
    if dual_tol is None:
        dual_tol = 1e-10 * np.max(np.abs(Atb)) if Atb.size else 0.0

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    if not np.any(b):
        return x, 0
    w = Atb.copy()
    it = 0
    while True:
        cand = np.where(passive, -np.inf, w)
        j = int(np.argmax(cand))
        if cand[j] <= dual_tol:
            break
        passive[j] = True
        while True:
            it += 1
            if it > max_iter:
                raise MaxIterationsExceeded(max_iter)
            idx = np.flatnonzero(passive)
            sol, *_ = np.linalg.lstsq(A[:, idx], b, rcond=None)
            if np.all(sol > 0):
                x[:] = 0.0
                x[idx] = sol
                break
            neg = sol <= 0
            xi = x[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(xi[neg] > 0, xi[neg] / (xi[neg] - sol[neg]), 0.0)
            k = int(np.argmin(ratios))
            x[idx] = xi + ratios[k] * (sol - xi)
            x[idx[neg][k]] = 0.0
            # indices that hit the boundary leave the passive set
            passive[idx[x[idx] <= 0]] = False
            x[~passive] = 0.0
            if not passive.any():
                break
        w = A.T @ (b - A @ x)
    return x, it


def solve_nnls(
    system: MeasurementSystem,
    u: CorrelationVector,
    W: float = 1.0,
    max_iter: Optional[int] = None,
) -> SolverReport:
    """Compressive (or noncompressive) estimate constrained to be non-negative."""
    x, it = nnls(system.psi_tilde, u.u, max_iter=max_iter)
    return _report(system, u.u, x, "NNLS", W, it, int(np.count_nonzero(x)))


def solve(system, u, method: str = "LS", W: float = 1.0) -> SolverReport:
    method = method.upper()
    if method == "LS":
        return solve_ls(system, u, W)
    if method == "NNLS":
        return solve_nnls(system, u, W)
    raise ValueError(f"unknown solver {method!r}")


# --- finite-sample diagnostics ---------------------------------------------


def predict_variance(r_seq, N: int, lags=None) -> float:
    """Approximate variance of a lag-zero sample correlation from ``N`` samples.

    ``(2/N) sum_{|m| < N} (1 - |m|/N) r(m)^2``, truncated to the lags supplied.
    ``r_seq`` is centred (lags ``-P..P``) unless ``lags`` is given.
    """
    r = np.asarray(r_seq, dtype=float)
    if lags is None:
        if len(r) % 2 == 0:
            raise ValueError("centred r_seq must have odd length; pass lags explicitly")
        lags = np.arange(len(r)) - len(r) // 2
    lags = np.abs(np.asarray(lags))
    wgt = np.clip(1 - lags / N, 0, None)
    return float(2 / N * np.sum(wgt * r * r))


def predict_bias(
    r_cross: Callable[[np.ndarray], np.ndarray],
    taps_a: np.ndarray,
    taps_b: np.ndarray,
    N: int,
) -> float:
    """Expected lag-zero correlation of two filtered, ``N``-sample windowed channels.

    Evaluates ``sum_m sum_l h_a(m) h_b(l) r(l - m) max(0, 1 - |m - l|/N)`` where
    ``r(k) = E y_a(n+k) y_b(n)`` is the channel cross-correlation. Taps are
    indexed by the same lags in both filters. Pass ``N = inf`` for the
    large-sample limit.
    """
    ha = np.asarray(taps_a, dtype=float)
    hb = np.asarray(taps_b, dtype=float)
    # c[d] = sum_m h_a(m) h_b(m + d), d = l - m
    c = np.correlate(hb, ha, mode="full")
    d = np.arange(len(c)) - (len(ha) - 1)
    wgt = np.clip(1 - np.abs(d) / N, 0, None)
    return float(np.sum(c * np.asarray(r_cross(d), dtype=float) * wgt))


def delayed_cross_correlation(
    r_xx: Callable[[np.ndarray], np.ndarray],
    pattern: SamplingPattern,
    a: int,
    b: int,
    lags,
    taps: list[np.ndarray],
) -> np.ndarray:
    """``r_{z_a z_b}(k) = E z_a(n+k) z_b(n)`` for delayed channels.

    ``r_xx`` gives the Nyquist-grid autocorrelation; ``taps[i]`` are the
    (equal-length, centred) delay filters of channel ``i``.
    """
    L = pattern.L
    dc = pattern.offsets[a] - pattern.offsets[b]
    ha, hb = taps[a], taps[b]
    c = np.correlate(hb, ha, mode="full")  # sum_m h_a(m) h_b(m + d)
    d = np.arange(len(c)) - (len(ha) - 1)
    lags = np.asarray(lags, dtype=int)
    # r_z(k) = sum_d c(d) r_y(k + d), r_y(j) = r_xx(jL + dc)
    j = lags[:, None] + d[None, :]
    return (r_xx(j * L + dc) * c[None, :]).sum(axis=1)


def predict_u_covariance(
    r_xx: Callable[[np.ndarray], np.ndarray],
    pattern: SamplingPattern,
    ordering: PairOrdering,
    N: int,
    taps: list[np.ndarray],
    max_lag: Optional[int] = None,
) -> np.ndarray:
    """Gaussian-approximation covariance of the raw correlation vector.

    Uses ``cov(r_ab, r_cd) = (1/N) sum_m (1 - |m|/N)
    [r_ac(m) r_bd(m) + r_ad(m) r_bc(m)]``, which for ``a = b = c = d``
    reduces to ``predict_variance``. The equal-channel entry averages over
    the ``q`` channel powers.
    """
    q = pattern.q
    P = (len(taps[0]) - 1) + (2 * pattern.L if max_lag is None else max_lag)
    P = min(P, N - 1)
    lags = np.arange(-P, P + 1)
    wgt = 1 - np.abs(lags) / N
    R = np.empty((q, q, len(lags)))
    for a in range(q):
        for b in range(q):
            R[a, b] = delayed_cross_correlation(r_xx, pattern, a, b, lags, taps)

    def cov(a, b, c, d):
        return np.sum(wgt * (R[a, c] * R[b, d] + R[a, d] * R[b, c])) / N

    # each entry is a weighted combination of channel-pair products
    entries = [[(1 / q, a, a) for a in range(q)]]
    a_idx, b_idx = ordering.channel_indices()
    entries += [[(1.0, a, b)] for a, b in zip(a_idx, b_idx)]
    n = len(entries)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            K[i, j] = K[j, i] = sum(
                wi * wj * cov(a, b, c, d)
                for wi, a, b in entries[i]
                for wj, c, d in entries[j]
            )
    return K
