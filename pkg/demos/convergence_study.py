"""Watching |B A^m C|^(1/m) converge, m up to 2^16.

Forming A^m directly overflows long before m = 65536.  The engine keeps the
powers in Jordan form, factors out each block's growth, and takes the root
in extended precision.  The error to the closed form decays roughly like
log(m)/m for defective A, so the table below shrinks by about a factor of
four per row once m is large.

Run:  python3 demos/convergence_study.py [out.csv]
"""
import sys

import numpy as np

from asympolar import JordanSpec, iterate_limit

rng = np.random.default_rng(7)
B = rng.normal(size=(3, 3))
C = rng.normal(size=(3, 3))

# A 2x2 Jordan block at 2 plus an eigenvalue 0.5, written in a random basis.
spec = JordanSpec(np.eye(3) + 0.4 * rng.normal(size=(3, 3)), ((2, 2), (0.5, 1)))
schedule = [4 ** k for k in range(1, 9)]
rep = iterate_limit(spec, B, C, schedule)

print(f"{'m':>7}  {'frobenius':>12}  {'spectral':>12}  {'singular values':>15}")
for m, f, s, v in zip(rep.schedule, rep.frob_errors, rep.spec_errors, rep.sv_errors):
    print(f"{m:>7}  {f:12.3e}  {s:12.3e}  {v:15.3e}")

print("\npredicted limit eigenvalues:", np.round(rep.D, 12))
print("error still falling over the last three points:", rep.tail_decreasing(3))

if len(sys.argv) > 1:
    rep.to_csv(sys.argv[1])
    print("CSV written to", sys.argv[1])
