"""
Values of quadratic forms at integer points
===========================================

Search, counting and a binary counterexample.
"""

import math

import numpy as np

from homdyn.quadforms import (QuadraticForm, closest_value, counting_ratio_table, gap_analysis,
                              is_rational_multiple, oppenheim_scan, parse_form)

Q = parse_form("1,-sqrt2/2,0,0,0,sqrt3")  # x^2 - sqrt2 xy + sqrt3 z^2
print("signature", Q.signature, "rational multiple:", is_rational_multiple(Q))

targets = np.round(np.linspace(-1, 1, 21), 10)
for r, hit in zip(targets, oppenheim_scan(Q, targets, 0.01, 200)):
    print(f"r = {r:5.2f}:", "none in box" if hit is None else f"{hit.vector} -> {hit.value:.5f}")

# the miss at 0.7 is genuine: the closest value in the box is just outside eps
dist, vec = closest_value(Q, 0.7, 200)
print(f"closest to 0.7 within N = 200: {vec}, off by {dist:.6f}")

# counting: lattice points with |Q| < 1 against the volume of the same region
Q4 = QuadraticForm.diagonal([1, 1, 1, -math.sqrt(2)])
table = counting_ratio_table(Q4, -1, 1, [10, 20, 40])
for row in table.rows:
    print(f"N = {row.N:3g}: count {row.count:6d}, volume {row.volume:9.1f}, ratio {row.ratio:.3f}")
print(f"growth exponent {table.exponent:.3f} (expected {table.expected_exponent})")

# binary form: values stay away from 0
gap = gap_analysis(2000)
print("min |p^2 - (3 + 2 sqrt2) q^2|:", gap.minimum, "at", gap.argmin)
