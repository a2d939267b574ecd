"""
Entropy of shifts, rotations and translations
=============================================

Exact iterated-partition entropies for three symbolic systems, plus the
Lie-theoretic entropy of diagonal translations.
"""

import math

import numpy as np

from homdyn.entropy import (baker, bernoulli, empirical_block_entropy, entropy_rate, rotation,
                            stretch_entropy, translation_entropy)
from homdyn.groups import a, u
from homdyn.lie import sl2, sl3

for system in (bernoulli(0.5), bernoulli(0.2), baker(), rotation(math.sqrt(3) / 100)):
    rate = entropy_rate(system, 200 if system.kind == "rotation" else 30)
    print(f"{system.label:>22s}  E^k/k at k = {rate.ks[-1]}: {rate.terminal:.6f}")

# the rotation grows only logarithmically: E^k <= log(2k)
rot = entropy_rate(rotation(math.sqrt(3) / 100), 500)
print("rotation, k = 500:", rot.Ek[-1], "<= log(1000) =", math.log(1000))

# sampling estimate, for comparison only
print("empirical Bernoulli(1/2), k = 6:", empirical_block_entropy(bernoulli(0.5), 6, 100_000) / 6)

# translations: log-Jacobian on the expanding subalgebra
print("a(0.7) in SL(2):", translation_entropy(a(0.7), sl2()))
print("u(5) in SL(2):  ", translation_entropy(u(5.0), sl2()))
g = np.diag([math.e, 1.0, 1 / math.e])
print("diag(e, 1, 1/e) in SL(3):", translation_entropy(g, sl3()))
print("stretch factors e^2, e^-2:", stretch_entropy([(math.exp(2), 1), (math.exp(-2), 1)]))
