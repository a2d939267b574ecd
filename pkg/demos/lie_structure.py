"""
Jordan parts, weights and the subalgebra S-tilde
================================================
"""

import numpy as np

from homdyn.groups import real_jordan_decompose
from homdyn.lie import s_tilde_case, s_tilde_cases, sl3, weight_decomposition

g = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]) @ np.diag([2.0, 1.0, 0.5])
parts = real_jordan_decompose(g)
for name, m in zip(("unipotent", "hyperbolic", "elliptic"), parts):
    print(name, np.round(m, 6).tolist())

alg = sl3()
w = weight_decomposition(alg, alg.element(np.diag([1.0, 0.0, -1.0])))
print("weight dimensions for diag(1, 0, -1):", w.dims())

for name in s_tilde_cases():
    sub = s_tilde_case(name)
    print(f"{name:>9s}: dim {sub.dim}, subalgebra {sub.is_subalgebra()}")
