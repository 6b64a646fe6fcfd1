"""Sampling-pattern design: random patterns, Golomb rulers and diagnostics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from ._rng import substream
from .core import SamplingPattern, build_measurement_system

RANK_RTOL = 1e-10

# Optimal (minimum-length) Golomb rulers. Orders 7 and 10 are the variants
# starting at mark 1 that are commonly quoted as sampling patterns.
_GOLOMB_TABLE: dict[int, tuple[int, ...]] = {
    2: (0, 1),
    3: (0, 1, 3),
    4: (0, 1, 4, 6),
    5: (0, 1, 4, 9, 11),
    6: (0, 1, 4, 10, 12, 17),
    7: (1, 3, 4, 11, 17, 22, 26),
    8: (0, 1, 4, 9, 15, 22, 32, 34),
    9: (0, 1, 5, 12, 25, 27, 35, 41, 44),
    10: (1, 2, 7, 11, 24, 27, 35, 42, 54, 56),
    11: (0, 1, 4, 13, 28, 33, 47, 54, 64, 70, 72),
    12: (0, 2, 6, 24, 29, 40, 43, 55, 68, 75, 76, 85),
    13: (0, 2, 5, 25, 37, 43, 59, 70, 85, 89, 98, 99, 106),
    14: (0, 4, 6, 20, 35, 52, 59, 77, 78, 86, 89, 99, 122, 127),
    15: (0, 4, 20, 30, 57, 59, 62, 76, 100, 111, 123, 136, 144, 145, 151),
    16: (0, 1, 4, 11, 26, 32, 56, 68, 76, 115, 117, 134, 150, 163, 168, 177),
    17: (0, 5, 7, 17, 52, 56, 67, 80, 81, 100, 122, 138, 159, 165, 168, 191, 199),
    18: (0, 2, 10, 22, 53, 56, 82, 83, 89, 98, 130, 148, 153, 167, 188, 192, 205,
         216),
    19: (0, 1, 6, 25, 32, 72, 100, 108, 120, 130, 153, 169, 187, 190, 204, 231,
         233, 242, 246),
    20: (0, 1, 8, 11, 68, 77, 94, 116, 121, 156, 158, 179, 194, 208, 212, 228,
         240, 253, 259, 283),
    21: (0, 2, 24, 56, 77, 82, 83, 95, 129, 144, 179, 186, 195, 255, 265, 285,
         293, 296, 310, 329, 333),
    22: (0, 1, 9, 14, 43, 70, 106, 122, 124, 128, 159, 179, 204, 223, 253, 263,
         270, 291, 330, 341, 353, 356),
    23: (0, 3, 7, 17, 61, 66, 91, 99, 114, 159, 171, 199, 200, 226, 235, 246,
         277, 316, 329, 348, 350, 366, 372),
    24: (0, 9, 33, 37, 38, 97, 122, 129, 140, 142, 152, 191, 205, 208, 252, 278,
         286, 326, 332, 353, 368, 384, 403, 425),
    25: (0, 12, 29, 39, 72, 91, 146, 157, 160, 161, 166, 191, 207, 214, 258,
         290, 316, 354, 372, 394, 396, 431, 459, 467, 480),
    26: (0, 1, 33, 83, 104, 110, 124, 163, 185, 200, 203, 249, 251, 258, 314,
         318, 343, 356, 386, 430, 440, 456, 464, 475, 487, 492),
}


@dataclass(frozen=True)
class GolombRuler:
    order: int
    marks: tuple[int, ...]

    @property
    def length(self) -> int:
        return self.marks[-1] - self.marks[0]

    def is_golomb(self) -> bool:
        d = [b - a for a, b in combinations(self.marks, 2)]
        return len(d) == len(set(d))

    def as_pattern(self, L: int) -> SamplingPattern:
        """Use the marks verbatim as channel offsets (requires ``max mark < L``)."""
        return SamplingPattern(L, self.marks)


def golomb_ruler(order: int) -> GolombRuler:
    """Tabulated minimum-length Golomb ruler of the given order (2..26)."""
    try:
        marks = _GOLOMB_TABLE[order]
    except KeyError:
        raise ValueError(
            f"no tabulated ruler of order {order}; available orders are "
            f"{min(_GOLOMB_TABLE)}..{max(_GOLOMB_TABLE)}"
        ) from None
    return GolombRuler(order, marks)


def ruler_orders() -> list[int]:
    return sorted(_GOLOMB_TABLE)


def random_pattern(L: int, q: int, seed) -> SamplingPattern:
    """Draw ``q`` offsets uniformly without replacement from ``{0..L-1}``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if not 2 <= q <= L:
        raise ValueError(f"need 2 <= q <= L, got q={q}, L={L}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SamplingPattern(L, rng.choice(L, size=q, replace=False).tolist())


@dataclass(frozen=True)
class PatternDiagnostics:
    rank: int
    condition_number: float
    full_rank: bool
    ratio: float
    singular_values: np.ndarray


def diagnose(pattern: SamplingPattern) -> PatternDiagnostics:
    """Rank and condition number of the stacked measurement matrix.

    Singular values below ``1e-10 * sigma_max`` count as zero. The condition
    number is infinite whenever the matrix lacks full column rank ``L``.
    """
    psi_tilde = build_measurement_system(pattern).psi_tilde
    sv = np.linalg.svd(psi_tilde, compute_uv=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0]))
    full = rank == pattern.L
    cond = float(sv[0] / sv[-1]) if full else float("inf")
    return PatternDiagnostics(
        rank=rank,
        condition_number=cond,
        full_rank=full,
        ratio=pattern.L / pattern.rows,
        singular_values=sv,
    )


def covers_consecutive_differences(pattern: SamplingPattern, s: int) -> bool:
    """True if the pattern's differences include every integer ``0..s-1``."""
    if s < 1:
        raise ValueError("s must be at least 1")
    return set(range(s)) <= pattern.difference_set()


def first_missing_difference(pattern: SamplingPattern) -> int:
    diffs = pattern.difference_set()
    t = 0
    while t in diffs:
        t += 1
    return t


def full_rank_random_pattern(
    L: int, q: int, seed: int, max_draws: int = 1000
) -> tuple[SamplingPattern, int]:
    """First full-rank random pattern in the substream sequence ``(seed, k)``.

    Returns the pattern and the draw index ``k`` that produced it.
    """
    for k in range(max_draws):
        pattern = random_pattern(L, q, substream(seed, k))
        if diagnose(pattern).full_rank:
            return pattern, k
    raise RuntimeError(f"no full-rank pattern for L={L}, q={q} in {max_draws} draws")


@dataclass(frozen=True)
class SweepPoint:
    q: int
    fraction_full_rank: float
    mean_condition: float
    trials: int


def threshold_sweep(
    L: int,
    q_range: Iterable[int],
    trials: int,
    seed: int,
    jobs: Optional[int] = None,
) -> list[SweepPoint]:
    """Monte Carlo fraction of full-rank random patterns for each ``q``.

    Trial ``k`` at channel count ``q`` uses the substream ``(seed, q, k)``.
    The mean condition number is taken over full-rank trials only (NaN if
    there are none).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(q: int, k: int) -> PatternDiagnostics:
        return diagnose(random_pattern(L, q, substream(seed, q, k)))

    out = []
    with ThreadPoolExecutor(max_workers=jobs or 1) as pool:
        for q in q_range:
            diags = list(pool.map(lambda k: one(q, k), range(trials)))
            conds = [d.condition_number for d in diags if d.full_rank]
            out.append(
                SweepPoint(
                    q=q,
                    fraction_full_rank=len(conds) / trials,
                    mean_condition=float(np.mean(conds)) if conds else float("nan"),
                    trials=trials,
                )
            )
    return out
