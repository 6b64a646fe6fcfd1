"""Sampling-pattern design: random patterns, the 0.12 threshold, and Golomb rulers."""

import numpy as np

from mcpsd import SamplingPattern, diagnose, golomb_ruler
from mcpsd.patterns import covers_consecutive_differences, first_missing_difference, threshold_sweep

L = 64
print(f"fraction of full-rank random patterns at L={L} (200 draws each)")
for p in threshold_sweep(L, range(12, 27, 2), trials=200, seed=0, jobs=4):
    ratio = L / (p.q * (p.q - 1) + 1)
    print(f"  q={p.q:2d}  L/(q(q-1)+1)={ratio:.3f}  full rank {p.fraction_full_rank:5.2f}  "
          f"mean cond {p.mean_condition:8.2f}")

# a Golomb ruler with only 10 marks already gives a well-conditioned system
ruler = golomb_ruler(10)
d = diagnose(ruler.as_pattern(L))
print(f"\norder-10 ruler {ruler.marks}: rank {d.rank}, condition {d.condition_number:.3f}")
print("singular values:", np.unique(np.round(d.singular_values, 6)))

# consecutive differences determine which sparsity levels are recoverable
p7 = golomb_ruler(7).as_pattern(128)
print(f"\norder-7 ruler covers 0..{first_missing_difference(p7) - 1}; "
      f"s=12 ok: {covers_consecutive_differences(p7, 12)}, "
      f"s=16 ok: {covers_consecutive_differences(p7, 16)}")
missing = sorted(set(range(27)) - p7.difference_set())
print("differences missing below 27:", missing)

# the same number of channels placed contiguously is rank deficient
print("contiguous 10 channels:", diagnose(SamplingPattern(L, range(10))).rank, "of", L)
