"""The rooted maps and the subtree-sum identity.

For root r each vertex is replaced, deepest first, by
s_i * prod over children j of (1 + c_ij / c_i * s_(j)).
Weighting the results by c_i gives the sum over all subtrees, whatever
the root.
"""

import math

import numpy as np

from treekummer.suites import random_positive
from treekummer.transform import (
    ParamMatrix,
    check_identity,
    check_root_invariance,
    involution_T,
    log_jacobian_inverse,
    numerical_jacobian,
    phi_forward,
    phi_inverse,
    random_param_matrix,
)
from treekummer.trees import chain, random_tree

C = ParamMatrix.constant(chain(3))
print("chain, root 0, s=(1,1,1):", phi_forward(C, 0, [1, 1, 1]))
print("chain, root 1, s=(1,1,1):", phi_forward(C, 1, [1, 1, 1]))
print("inverse of (3,2,1):", phi_inverse(C, 0, [3, 2, 1]), " log Jacobian:", log_jacobian_inverse(C, 0, [3, 2, 1]),
      "= -ln 6 =", -math.log(6))

rng = np.random.default_rng(7)
t = random_tree(8, rng)
C = random_param_matrix(t, rng)
s = random_positive(rng, 8)
print("random 8-vertex tree, edges", t.sorted_edges())
for r in range(3):
    chk = check_identity(C, r, s)
    print(f"  root {r}: weighted sum {chk.lhs:.12g}  subtree sum {chk.rhs:.12g}  rel err {chk.rel_err:.1e}")
print("  spread over all roots:", check_root_invariance(C, s))

y = random_positive(rng, 8, 0.1, 10)
fd = abs(np.linalg.det(numerical_jacobian(lambda v: phi_inverse(C, 2, v), y)))
print("Jacobian, closed form vs finite differences:", math.exp(log_jacobian_inverse(C, 2, y)), fd)

# The bivariate involution is its own inverse and fixes (1, 2).
print("T(1, 2) =", involution_T(1.0, 2.0), "  T(T(0.3, 5)) =", involution_T(*involution_T(0.3, 5.0)))
