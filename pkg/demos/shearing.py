"""
Shearing of nearby unipotent orbits
===================================

Two points ``x`` and ``x q`` with ``q`` close to the identity drift apart
under ``u(t)``; the displacement is quadratic in ``t`` and the
bottom-left entry takes over.
"""

import math

import numpy as np
from scipy.linalg import expm

from homdyn.shearing import (diagonal_magnitude, extension_table, first_divergence,
                             geodesic_displacement, joint_transverse_divergence,
                             transverse_component, unipotent_displacement)

rng = np.random.default_rng(0)
x = rng.standard_normal((2, 2))
x -= np.trace(x) / 2 * np.eye(2)
q = expm(1e-6 * x / np.linalg.norm(x))

disp = unipotent_displacement(q)
t_star, entry = first_divergence(disp, 1.0)
print(f"first divergence at t = {t_star:.1f} in entry {entry}, diagonal {diagonal_magnitude(disp, t_star):.2e}")
for t in np.geomspace(1, t_star, 5):
    print(f"  t = {t:9.1f}  |displacement| =", np.round(np.abs(disp(t)), 8).tolist())

# geodesic flow instead: exponential, not polynomial
print("geodesic, t = 5:", geodesic_displacement(q, 5.0).round(6).tolist())

# along the way the drift is in the direction of the flow's normalizer
beta, alpha, sigma = transverse_component(q, t_star / 4)
print(f"at t*/4: beta {beta:.2e}, alpha {alpha:.2e}, sigma {sigma:.2e}")

# polynomials cannot grow much just past an interval where they are small
for d, delta, eps in extension_table([1, 2, 4, 8], [1.0]):
    print(f"degree {d}: sup stays within 2x for a {1 + eps:.4f}x longer interval")

# two copies of SL(2): the shearing sees only the difference of the offsets
jd = joint_transverse_divergence(0.3, 0.3 + 1e-4)
print("joint: diagonal =", jd.diagonal, " t^2 gap =", jd.leading_gap, " t* ~", math.sqrt(1 / abs(jd.leading_gap)))
