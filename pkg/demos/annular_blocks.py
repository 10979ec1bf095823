"""Building blocks of the annular construction and one assembled function.

Run:  python3 demos/annular_blocks.py
"""

import math

from blaschkepow import annular

for N in (512, 1024, 2048):
    r = annular.lemma1_verify(N)
    print(f"N={N}: min |g_N| on |z|=1-1/N = {r['ii_min_modulus']:.4f} "
          f"(bound e^-4 = {math.exp(-4):.4f}), tail decay {r['iii_delta']:.3f}")

spec = annular.AnnularSpec.lp_gap(2, 3, 2.5, A=16, levels=3)
rep = annular.annular_verify(spec)
print("\nblocks:", [(b.N, round(b.weight, 3)) for b in spec.blocks])
for row in rep.circle_minima:
    print(f"level {row['k']}: radius {row['radius']:.6f} min|f| {row['min_modulus']:.4g} "
          f"weight {row['predicted_scale']:.4g}")
print("l^q increments:", [f"{v:.3f}" for v in rep.tail_norms["lq_increments"]])
print("paired-min increments:", [f"{v:.3f}" for v in rep.tail_norms["paired_min_lp_increments"]])
print(rep.verdicts)
