"""Partition entropy, exact entropy rates for three symbolic models, and
entropy of matrix translations via expansion rates.

Natural logarithms throughout.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, InvalidInput, NotRealDiagonalizable
from .groups import real_jordan_decompose
from .lie import horospherical_subalgebra, log_jacobian

ROTATION_ARC_CAP = 10_000
DYADIC_K_CAP = 60


def entropy(p):
    """``sum p_i log(1/p_i)`` with ``0 log(1/0) = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidInput("weights must be finite and non-negative")
    if abs(p.sum() - 1.0) > 1e-12 * max(1, p.size):
        raise InvalidInput(f"weights sum to {float(p.sum()):.17g}, not 1")
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _grouped_entropy(weights, counts):
    """Entropy of a partition with ``counts[i]`` cells of weight ``weights[i]``."""
    total = 0.0
    for w, c in zip(weights, counts):
        if w > 0:
            total -= c * w * math.log(w)
    return total


@dataclass(frozen=True)
class FinitePartition:
    """Partition of a finite probability space.

    ``atoms`` holds the point masses and ``labels[i]`` the cell of atom ``i``.
    """

    atoms: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        labels = np.asarray(self.labels)
        if atoms.shape != labels.shape[:1] or atoms.ndim != 1:
            raise InvalidInput("one label per atom is required")
        if np.any(atoms < 0) or abs(atoms.sum() - 1.0) > 1e-12:
            raise InvalidInput("atom weights must be a probability vector")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_weights(cls, p):
        p = np.asarray(p, dtype=float)
        return cls(p, np.arange(p.size))

    @classmethod
    def trivial(cls, atoms):
        return cls(atoms, np.zeros(len(atoms), dtype=int))

    @property
    def cells(self):
        return np.unique(self.labels, axis=0)

    @property
    def weights(self):
        _, inv = np.unique(self.labels, axis=0, return_inverse=True)
        w = np.bincount(inv.ravel(), weights=self.atoms)
        return w[w > 0]

    @property
    def m(self):
        return len(self.weights)

    def entropy(self):
        return entropy(self.weights)

    def refines(self, other):
        """True when every cell of ``self`` lies inside a cell of ``other``."""
        _check_same_space(self, other)
        return join(self, other).m == self.m


def _check_same_space(A, B):
    if A.atoms.shape != B.atoms.shape or not np.array_equal(A.atoms, B.atoms):
        raise InvalidInput("partitions live on different spaces")


def join(A, B):
    """Common refinement; cells are the nonempty intersections."""
    _check_same_space(A, B)
    la = A.labels.reshape(len(A.atoms), -1)
    lb = B.labels.reshape(len(B.atoms), -1)
    return FinitePartition(A.atoms, np.hstack([la, lb]))


def joint_table_partitions(table):
    """Two partitions ``(A, B)`` of the cells of a joint probability table (rows = A)."""
    t = np.asarray(table, dtype=float)
    rows, cols = np.indices(t.shape)
    atoms = t.ravel()
    return FinitePartition(atoms, rows.ravel()), FinitePartition(atoms, cols.ravel())


def conditional_entropy(B, A):
    """``H(B | A) = H(A v B) - H(A)``."""
    return join(A, B).entropy() - A.entropy()


# symbolic systems ----------------------------------------------------------

@dataclass(frozen=True)
class SymbolicSystem:
    """One of the model systems with its canonical two-cell partition.

    kind is ``"rotation"`` (parameter beta, partition ``[0,1/2), [1/2,1)``),
    ``"bernoulli"`` (parameter p, partition by the zeroth symbol) or
    ``"baker"`` (partition into left and right halves).  ``inverse``
    selects the inverse map.
    """

    kind: str
    param: float = 0.5
    inverse: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in ("rotation", "bernoulli", "baker"):
            raise InvalidInput(f"unknown system {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.param <= 1.0:
            raise InvalidInput("bernoulli parameter must lie in [0, 1]")
        if not math.isfinite(self.param):
            raise InvalidInput("parameter must be finite")

    @property
    def label(self):
        base = self.name or (self.kind if self.kind == "baker" else f"{self.kind}({self.param:g})")
        return base + ("^-1" if self.inverse else "")


def rotation(beta, inverse=False):
    return SymbolicSystem("rotation", float(beta), inverse)


def bernoulli(p=0.5, inverse=False):
    return SymbolicSystem("bernoulli", float(p), inverse)


def baker(inverse=False):
    return SymbolicSystem("baker", 0.5, inverse)


def rotation_arcs(beta, k):
    """Arc lengths of the join of ``T^-j A`` for ``j < k`` under ``t -> t + beta``.

    The cut points are ``-j beta`` and ``1/2 - j beta`` mod 1.
    """
    if 2 * k > ROTATION_ARC_CAP:
        raise CapExceeded(f"k = {k} needs more than {ROTATION_ARC_CAP} arcs")
    j = np.arange(k)
    cuts = np.concatenate([(-j * beta) % 1.0, (0.5 - j * beta) % 1.0])
    cuts = np.unique(cuts)
    lengths = np.diff(np.append(cuts, cuts[0] + 1.0))
    return lengths[lengths > 0]


def _dyadic_groups(p, k):
    if k > DYADIC_K_CAP:
        raise CapExceeded(f"k = {k} exceeds the cap {DYADIC_K_CAP} for cylinder sets")
    j = np.arange(k + 1)
    weights = np.array([p ** int(i) * (1 - p) ** int(k - i) for i in j])
    counts = np.array([math.comb(k, int(i)) for i in j], dtype=float)
    return weights, counts


def iterated_information(sys, k):
    """``E^k = H(A v T^-1 A v ... v T^-(k-1) A)`` for the canonical partition, exactly.

    The rotation join consists of at most ``2k`` arcs.  For the Bernoulli
    shift the join cells are cylinders of length ``k``, grouped by the
    number of ones.  The baker map is handled through its isomorphism with
    the Bernoulli(1/2) shift, under which the left/right partition is the
    zeroth-coordinate partition; the inverse map is the reverse shift,
    whose joins are again ``2^k`` cylinders.
    """
    if k < 1:
        raise InvalidInput("k must be at least 1")
    if sys.kind == "rotation":
        beta = -sys.param if sys.inverse else sys.param
        return entropy(rotation_arcs(beta, k))
    p = sys.param if sys.kind == "bernoulli" else 0.5
    return _grouped_entropy(*_dyadic_groups(p, k))


@dataclass(frozen=True)
class EntropyRate:
    system: str
    ks: np.ndarray
    Ek: np.ndarray

    @property
    def rates(self):
        return self.Ek / self.ks

    @property
    def terminal(self):
        return float(self.rates[-1])

    def rows(self):
        return [(self.system, int(k), float(e), float(e / k)) for k, e in zip(self.ks, self.Ek)]


def subadditivity_violation(Ek, tol=1e-10):
    """Largest ``E^(k+l) - E^k - E^l`` over the computed range (should be <= 0).

    ``Ek[i]`` holds ``E^(i+1)``.
    """
    n = len(Ek)
    worst = -math.inf
    for m in range(2, n + 1):
        for k in range(1, m // 2 + 1):
            worst = max(worst, Ek[m - 1] - Ek[k - 1] - Ek[m - k - 1])
    return worst


def entropy_rate(sys, k_max, check=True):
    """``E^k / k`` for ``k = 1..k_max``.  Subadditivity of ``E^k`` is verified
    when ``check`` is set (raises ``ArithmeticError`` on violation)."""
    if k_max < 2:
        raise InvalidInput("k_max must be at least 2")
    ks = np.arange(1, k_max + 1)
    Ek = np.array([iterated_information(sys, int(k)) for k in ks])
    if check and k_max <= 600:
        bad = subadditivity_violation(Ek)
        if bad > 1e-10:
            raise ArithmeticError(f"E^k is not subadditive (excess {bad:g})")
    return EntropyRate(sys.label, ks, Ek)


def simulate_itineraries(sys, k, samples=10_000, seed=0):
    """Empirical cell frequencies of the ``k``-fold join by direct simulation.

    Returns a dict mapping the itinerary (tuple of 0/1) to its frequency.
    """
    rng = np.random.default_rng(seed)
    if sys.kind == "rotation":
        beta = -sys.param if sys.inverse else sys.param
        x = rng.random(samples)
        bits = [((x + j * beta) % 1.0 >= 0.5) for j in range(k)]
    elif sys.kind == "bernoulli":
        seq = rng.random((samples, k)) < sys.param
        bits = [seq[:, j] for j in range(k)]
    else:
        x, y = rng.random(samples), rng.random(samples)
        bits = []
        for _ in range(k):
            bits.append(x > 0.5 if not sys.inverse else y > 0.5)
            x, y = _baker_step(x, y, sys.inverse)
    words = np.stack(bits, axis=1).astype(np.int8)
    uniq, counts = np.unique(words, axis=0, return_counts=True)
    return {tuple(int(b) for b in w): c / samples for w, c in zip(uniq, counts)}


def _baker_step(x, y, inverse=False):
    if not inverse:
        left = x <= 0.5
        return np.where(left, 2 * x, 2 * x - 1), np.where(left, y / 2, (y + 1) / 2)
    low = y <= 0.5
    return np.where(low, x / 2, (x + 1) / 2), np.where(low, 2 * y, 2 * y - 1)


def empirical_block_entropy(sys, k, samples=10_000, seed=0):
    """Plug-in estimate of ``E^k`` from simulated itineraries.

    Approximate diagnostic only: biased low once ``e^(E^k)`` approaches the
    sample count.
    """
    freqs = np.array(list(simulate_itineraries(sys, k, samples, seed).values()))
    return entropy(freqs / freqs.sum())


# expansion-rate entropy ----------------------------------------------------

def stretch_entropy(spec):
    """``sum d_i log tau_i`` over the factors ``tau_i > 1``."""
    total = 0.0
    for tau, d in spec:
        if not tau > 0 or int(d) != d or d < 1:
            raise InvalidInput("need tau > 0 and integer dimension >= 1")
        if tau > 1:
            total += d * math.log(tau)
    return total


def parse_stretch_spec(text):
    """Parse ``"tau:dim,tau:dim"``; ``tau`` may be a float or ``e^x``."""
    out = []
    for item in text.split(","):
        tau, _, d = item.strip().partition(":")
        tau = tau.strip()
        val = math.exp(float(tau[2:])) if tau.startswith("e^") else float(tau)
        try:
            out.append((val, int(d)))
        except ValueError as exc:
            raise InvalidInput(f"bad stretch item {item!r}") from exc
    return out


def translation_entropy(g, alg):
    """``log J(g, G_+)``: log-Jacobian of ``Ad g`` on the expanding horospherical subalgebra.

    When ``Ad g`` is defective (e.g. unipotent ``g``) the hyperbolic Jordan
    factor of ``g`` is used instead; it has the same expanding subalgebra
    and the same Jacobian there.
    """
    g = np.asarray(g, dtype=float)
    try:
        sub = horospherical_subalgebra(alg, g)
        return log_jacobian(alg, g, sub)
    except NotRealDiagonalizable:
        if g.ndim != 2:
            raise
    hyp = real_jordan_decompose(g).hyp
    sub = horospherical_subalgebra(alg, hyp)
    return log_jacobian(alg, hyp, sub)


def write_rate_table(fh, rates):
    w = csv.writer(fh)
    w.writerow(["system", "k", "Ek", "Ek_over_k"])
    for rate in rates:
        for s, k, e, r in rate.rows():
            w.writerow([s, k, f"{e:.12g}", f"{r:.12g}"])
