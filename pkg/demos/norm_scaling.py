"""Scaling of the l^p norms of the coefficients with n.

Run:  python3 demos/norm_scaling.py
"""

import math
from fractions import Fraction

from blaschkepow import exact, norms

lam = Fraction(1, 2)
ns = [2**m for m in range(8, 14)]
seqs = {n: exact.coeff_dft(lam, n) for n in ns}

print(f"{'p':>4} {'fitted':>9} {'gauge':>9} {'resid':>9}")
for p in (1, 2, 3, 4, 6, math.inf):
    rep = norms.exponent_fit(lam, p, ns, seqs)
    print(f"{p:>4} {rep.fitted_exponent:+9.4f} {rep.predicted_exponent:+9.4f} "
          f"{rep.residual_slope:+9.4f}")

# the flatness law: n^(1/3) max |c(k)| stays bounded
for n in ns:
    print(n, round(n ** (1 / 3) * norms.lp_norm(seqs[n], math.inf), 4))
