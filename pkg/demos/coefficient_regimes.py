"""Coefficients of b_{1/2}**n across the eight bands, exact against asymptotic.

Run:  python3 demos/coefficient_regimes.py [n]
"""

import math
import sys
from fractions import Fraction

import numpy as np

from blaschkepow import asym, exact
from blaschkepow.core import default_thresholds

lam = Fraction(1, 2)
n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000

th = default_thresholds(lam, n)
print(f"n = {n}, band edges in k:",
      ", ".join(f"{float(e):.1f}" for e in th.edges(lam, n)))

ks = np.unique(np.linspace(0, 8 * n, 81).round().astype(int))
table = asym.error_sweep(lam, n, ks)
print(f"{'k':>6} {'region':>6} {'log10|exact|':>13} {'log10|asym|':>12} {'rel err':>9}")
for k, reg, _, _, _, rel, _ in table.rows[::4]:
    # magnitudes in log space: far from the transition the values underflow
    res = asym.asym_auto(lam, n, int(k), with_saddle=False)
    _, el = exact.coeff_dft_shifted(lam, n, int(k))[:2] if k > 0 else (0, n * math.log(0.5))
    print(f"{k:6d} {reg:>6} {el / math.log(10):13.3f} {res.log_abs / math.log(10):12.3f} {rel:9.2e}")

print()
for reg, s in table.summary().items():
    print(f"{reg:>5}: {s['count']:3d} points, max rel err {s['max_rel']:.2e}")
