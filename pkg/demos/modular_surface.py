"""
Orbits on the modular surface
=============================

Reduce points into the standard fundamental domain, then follow a few
horocycle and geodesic orbits and compare time averages with the
quadrature average over the domain.
"""

import math

import numpy as np

from homdyn.flows import (closed_horocycle_fraction, homogeneous_orbit, nondivergence_fraction,
                          periodic_geodesic_basepoint, smooth_indicator_below, time_average)
from homdyn.groups import a, rotation
from homdyn.hyperbolic import hyperbolic_area, reduce_to_f, space_average

# a point far from the domain comes back in a handful of steps
z, gamma = reduce_to_f(complex(3.7, 0.01))
print("reduced point:", complex(z), "via", gamma)

# area by quadrature, to compare with pi / 3
print("area:", hyperbolic_area("F"), "pi/3 =", math.pi / 3)

f = smooth_indicator_below(2.0)
space = space_average(lambda x, y: float(f(x, y)))
print(f"space average of y <= 2: {space:.4f}")

# horocycle through a generic point
generic = homogeneous_orbit("horocycle", rotation(1.0) @ a(0.3), 1e4, 0.01)
print(f"generic horocycle, T = 1e4: {time_average(generic, f):.4f}")

# the horocycle through the identity is closed (period 1, height 1), so
# its average is the average along that closed curve
closed = homogeneous_orbit("horocycle", np.eye(2), 1e4, 0.01)
print(f"horocycle from I:          {time_average(closed, f):.4f}")

# closed horocycles low down are nearly equidistributed, high up they are not
for s in (0.0, 1.5, 3.0):
    y0 = math.exp(-2 * s)
    orbit = homogeneous_orbit("horocycle", a(s), 2000.0, 0.01)
    print(f"height {y0:.4f}: above 1.2 sampled {nondivergence_fraction(orbit, 1.2):.4f}, "
          f"exact {closed_horocycle_fraction(y0, 1.2):.4f}")

# a closed geodesic never goes high
g0, period = periodic_geodesic_basepoint(np.array([[2, 1], [1, 1]]))
geo = homogeneous_orbit("geodesic", g0, 1e3, 0.01, period=period)
print(f"closed geodesic: max height {geo.y.max():.4f}, average of y <= 2 = {time_average(geo, f):.4f}")
