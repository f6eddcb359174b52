"""The closed-form limit of |B A^m C|^(1/m) and why B drops out.

Take A = [[2, 1], [0, 1]].  Its eigenvalues have moduli 2 and 1, so the
singular values of A^m grow like 2^m and 1^m.  The m-th root of |B A^m C|
still has a nontrivial limit: it is a positive matrix whose eigenvalues are
those moduli and whose eigenvectors depend on C and on the eigenvectors of A.

Run:  python3 demos/closed_form_limit.py
"""
import numpy as np

from asympolar import JordanSpec, predicted_limit_left, predicted_limit_right
from asympolar.jordan import cmjd_numeric

np.set_printoptions(precision=6, suppress=True)

# A = M J M^{-1} with J = diag(2, 1); the columns of M are eigenvectors.
spec = JordanSpec(np.array([[1.0, 1.0], [0.0, -1.0]]), ((2, 1), (1, 1)))
print("A =\n", spec.similar(spec.J()).real)

for C in (np.eye(2), np.array([[1.0, 0.0], [1.0, 1.0]])):
    res = predicted_limit_right(spec, C)
    print("\nC =\n", C)
    print("limit of |B A^m C|^(1/m) =\n", res.limit.real)
    print("eigenvalues:", np.linalg.eigvalsh(res.limit))

# A different eigenvector basis for the same A gives the same answer.
other = JordanSpec(spec.M @ np.diag([3.0, -0.5]), spec.blocks)
print("\nrescaled eigenvectors change the limit by",
      np.abs(predicted_limit_right(other, np.eye(2)).limit - predicted_limit_right(spec, np.eye(2)).limit).max())

# The Jordan data can also be recovered numerically from a plain matrix.
numeric_spec, _ = cmjd_numeric(np.array([[2.0, 1.0], [0.0, 1.0]]))
print("from a plain matrix:\n", predicted_limit_right(numeric_spec, np.eye(2)).limit.real)

# On the left side, |(B A^m C)^*|^(1/m) forgets C instead of B.
print("\nleft-side limit with B = I:\n", predicted_limit_left(spec, np.eye(2)).limit.real)
