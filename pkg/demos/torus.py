"""
Straight-line flows on tori
===========================
"""

import math

import numpy as np

from homdyn.flows import TorusState, closure_occupancy, torus_orbit_closure, torus_time_average

for v in [(math.sqrt(2), 1.0, 0.0), (1.0, 2.0), (0.0, 0.0), (1.0, math.sqrt(2), math.sqrt(3))]:
    c = torus_orbit_closure(v)
    inside, outside = closure_occupancy(v, closure=c)
    print(f"v = {np.round(v, 4)}: closure dim {c.dimension}, relations {c.relations}, "
          f"boxes hit {inside:.3f} inside / {outside:.3f} outside")

# time averages of a character vanish unless it is constant on the orbit
s = TorusState([0.0, 0.0], [math.sqrt(2), 1.0])
for T in (10, 100, 1000):
    avg = torus_time_average(s, lambda p: np.cos(2 * np.pi * (p[:, 0] + p[:, 1])), T, 0.01)
    print(f"T = {T:5d}: {avg:+.5f}")
