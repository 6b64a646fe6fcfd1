"""Channel count, resolution and rate: noncompressive versus compressive regimes."""

import csv
import io

from mcpsd.experiment import emit_tradeoff_table

W, s = 2e9, 16
table = list(csv.DictReader(io.StringIO(emit_tradeoff_table(range(16, 1025, 16), W, s))))
print(f"W = {W / 1e9:.0f} GHz, sparsity s = {s}")
print(f"{'L':>5} {'res MHz':>9} {'q NC':>5} {'rate NC':>9} {'q C':>4} {'rate C':>9}")
for r in table[::4]:
    rate_c = f"{float(r['rateHz_C']) / 1e6:9.2f}" if r["rateHz_C"] else " " * 9
    print(f"{r['L']:>5} {float(r['resolutionHz']) / 1e6:9.3f} {r['minQ_NC']:>5} "
          f"{float(r['rateHz_NC']) / 1e6:9.2f} {r['minQ_C']:>4} {rate_c}")

# the noncompressive rate falls roughly like 1/sqrt(L); the compressive one like 1/L
rows = {int(r["L"]): r for r in table}
print(f"\nfrom L=64 to L=1024 the noncompressive rate drops by "
      f"{float(rows[64]['rateHz_NC']) / float(rows[1024]['rateHz_NC']):.1f}x, "
      f"the compressive rate by {float(rows[64]['rateHz_C']) / float(rows[1024]['rateHz_C']):.1f}x")
