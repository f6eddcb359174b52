"""Which growth rate does a vector see?

For each modulus gamma_j of the eigenvalues of A there is a projection E_j,
and ||A^m x||^(1/m) tends to gamma_j exactly when x lies in the range of E_j
but not of E_{j+1}.  The projections also rebuild the C = I limit as
sum_j gamma_j (E_j - E_{j+1}).

Run:  python3 demos/growth_classification.py
"""
import numpy as np

from asympolar import JordanSpec, growth_exponent, nayak_projections, predicted_limit_right

np.set_printoptions(precision=4, suppress=True)

# Moduli 3 (a rotation-like complex pair), 1 (a Jordan block), 1/2.
M = np.array([
    [1.0, 0.2, 0.0, 0.3, 0.0],
    [0.0, 1.0, 0.4, 0.0, 0.1],
    [0.5, 0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.3, 1.0, 0.2],
    [0.1, 0.0, 0.0, 0.0, 1.0],
])
spec = JordanSpec(M, ((3j, 1), (-3j, 1), (1, 2), (0.5, 1)))
nay = nayak_projections(spec)
print("moduli:", nay.gammas, "multiplicities:", nay.multiplicities)
for j in range(1, len(nay.gammas) + 1):
    print(f"rank E_{j} = {np.linalg.matrix_rank(nay.E(j))}")
print("reconstruction error:",
      np.abs(nay.reconstruction - predicted_limit_right(spec, np.eye(5)).limit).max())

rng = np.random.default_rng(1)
vectors = {
    "generic": rng.normal(size=5),
    "eigenvector for 1/2": M[:, 4],
    "generalized eigenvector for 1": M[:, 3],
    "mix of 1 and 1/2": M[:, 2] + M[:, 4],
}
print()
for name, x in vectors.items():
    res = growth_exponent(spec, x)
    print(f"{name:>30}: estimate {res.estimate:.4f}, group {res.classified_j} "
          f"(gamma = {nay.gammas[res.classified_j - 1]:g})")
