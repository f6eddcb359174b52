"""The same limit inside SL_n(R).

For g in SL_n(R) the limit of |g1 g^m g2|^(1/m) is k b k^T, where b is the
hyperbolic part of g (its eigenvalue moduli, sorted) and k is the orthogonal
factor in the Iwasawa decomposition of a matrix built from g2 and the
eigenvectors of g.  Pushing everything through the adjoint representation
Ad: SL_n -> GL(sl_n) turns this into the matrix statement on a bigger
space, and the two answers agree.

Run:  python3 demos/lie_bridge.py
"""
import numpy as np

from asympolar import liebridge
from asympolar.acceptance import random_sl

np.set_printoptions(precision=6, suppress=True)

g = np.array([[2.0, 1.0], [0.0, 0.5]])
g2 = np.array([[1.0, 0.0], [1.0, 1.0]])
g1 = random_sl(np.random.default_rng(3), 2)

k, a, n = liebridge.iwasawa(g2)
print("Iwasawa of g2:  k =\n", k, "\n a =\n", a, "\n n =\n", n)

cm = liebridge.group_cmjd(g)
print("\nhyperbolic part b =", np.diag(cm.b))

res = liebridge.lie_limit(g, g1, g2)
print("limit k b k^T =\n", res.limit)

rep = liebridge.ad_consistency(g, g1, g2)
print("\nAd(limit) vs prediction from Ad(g):", f"{rep.predicted_error:.1e}")
print("Ad(|x|) vs |Ad(x)| (relative):     ", f"{max(rep.modulus_errors):.1e}")
print("numeric iterate at m = 2^16:       ", f"{rep.numeric_error:.1e}")

# A 3x3 example with separated moduli.
rng = np.random.default_rng(11)
g, g1, g2 = (random_sl(rng, 3) for _ in range(3))
rep = liebridge.ad_consistency(g, g1, g2)
print("\nSL_3: Ad gap", f"{rep.predicted_error:.1e}", "numeric gap", f"{rep.numeric_error:.1e}",
      "ok" if rep.ok() else "NOT ok")
