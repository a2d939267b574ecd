"""Divergence of nearby orbits under conjugation by ``u(t)`` and ``a(t)``."""

import csv
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (FactorizationUndefined, InvalidInput, MagnitudeOverflow,
                     NoDivergence)
from .groups import a, check_unimodular, u, v
from .tolerances import JOINT_DIAGONAL


@dataclass(frozen=True)
class DisplacementPolynomial:
    """Entries of ``u(-t) q u(t) - I`` as polynomials in ``t``."""

    entries: tuple  # ((p11, p12), (p21, p22)) of numpy Polynomial

    def __call__(self, t):
        return np.array([[p(t) for p in row] for row in self.entries])

    def coefficients(self):
        """Array of shape ``(2, 2, 3)`` with coefficients of ``1, t, t^2``."""
        out = np.zeros((2, 2, 3))
        for i in range(2):
            for j in range(2):
                c = self.entries[i][j].coef
                out[i, j, :len(c)] = c
        return out

    def is_constant(self):
        return not np.any(self.coefficients()[..., 1:])


def unipotent_displacement(q):
    """Closed form of ``u(-t) q u(t) - I``.

    With ``q - I = [[a, b], [c, d]]`` the entries are
    ``a + b t``, ``b``, ``c - (a - d) t - b t^2`` and ``d - b t``.
    """
    q = check_unimodular(q)
    if q.shape != (2, 2):
        raise InvalidInput("q must be 2x2")
    (a_, b), (c, d) = q - np.eye(2)
    P = Polynomial
    return DisplacementPolynomial((
        (P([a_, b]), P([b])),
        (P([c, -(a_ - d), -b]), P([d, -b])),
    ))


def geodesic_displacement(q, t):
    """``a(-t) q a(t) - I = [[a, b e^{-2t}], [c e^{2t}, d]]``."""
    q = check_unimodular(q)
    if abs(t) > 300:
        raise MagnitudeOverflow("|t| > 300 overflows e^{2t}")
    (a_, b), (c, d) = q - np.eye(2)
    return np.array([[a_, b * math.exp(-2 * t)], [c * math.exp(2 * t), d]])


def direct_conjugate(q, t, flow="unipotent"):
    m = u if flow == "unipotent" else a
    return m(-t) @ np.asarray(q, dtype=float) @ m(t)


def first_divergence(disp, L):
    """First ``t >= 0`` at which some entry of the displacement reaches ``|entry| = L``.

    Returns ``(t_star, (row, col))`` with 1-based matrix position.
    """
    if not L > 0:
        raise InvalidInput("threshold must be positive")
    start = np.abs(disp(0.0)).max()
    if start >= L:
        raise InvalidInput("displacement already exceeds the threshold at t = 0")
    best = (math.inf, None)
    for i in range(2):
        for j in range(2):
            p = disp.entries[i][j]
            for target in (L, -L):
                for r in (p - target).roots():
                    if abs(r.imag) > 1e-9 * max(1.0, abs(r)) or r.real < 0:
                        continue
                    if r.real < best[0]:
                        best = (float(r.real), (i + 1, j + 1))
    if best[1] is None:
        raise NoDivergence("no entry ever reaches the threshold")
    return best


def diagonal_magnitude(disp, t):
    m = disp(t)
    return abs(m[0, 0]) + abs(m[1, 1])


def _sup_abs(p, lo, hi):
    pts = [lo, hi]
    if p.degree() > 1:
        pts += [r.real for r in p.deriv().roots() if abs(r.imag) < 1e-12 and lo < r.real < hi]
    return max(abs(p(x)) for x in pts)


def polynomial_extension_factor(coef, k, length, delta):
    """Largest ``eps`` with ``sup |f|`` on ``[k, k + (1+eps) length]`` at most ``(1+delta) C``.

    ``C`` is ``sup |f|`` on ``[k, k + length]`` and ``coef`` lists
    coefficients from the constant term upward.  Returns ``math.inf``
    when the bound never breaks.
    """
    p = Polynomial(np.asarray(coef, dtype=float)).trim()
    if not length > 0 or not delta > 0:
        raise InvalidInput("length and delta must be positive")
    if p.degree() > 8:
        raise InvalidInput("degree is limited to 8")
    end = k + length
    C = _sup_abs(p, k, end)
    bound = (1 + delta) * C
    crossings = []
    for target in (bound, -bound):
        for r in (p - target).roots():
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > end:
                crossings.append(r.real)
    if not crossings:
        return math.inf
    return (min(crossings) - k) / length - 1.0


@dataclass(frozen=True)
class JointDivergence:
    first: DisplacementPolynomial
    second: DisplacementPolynomial
    diagonal: bool

    @property
    def leading_gap(self):
        """Difference of the ``t^2`` coefficients of the bottom-left entries."""
        return self.first.coefficients()[1, 0, 2] - self.second.coefficients()[1, 0, 2]


def joint_transverse_divergence(r1, r2, tol=JOINT_DIAGONAL):
    """Displacement of ``(v(r1), v(r2))`` under the diagonal unipotent flow of SL(2) x SL(2)."""
    return JointDivergence(unipotent_displacement(v(r1)), unipotent_displacement(v(r2)),
                           abs(r1 - r2) <= tol)


def transverse_component(q, t):
    """Coordinates of ``u(-t) q u(t) = v(beta) a(alpha) u(sigma)``.

    Returns ``(beta, alpha, sigma)``.  Needs the bottom-right entry of the
    conjugate to be positive.
    """
    m = direct_conjugate(check_unimodular(q), t)
    m22 = m[1, 1]
    if not m22 > 0:
        raise FactorizationUndefined("bottom-right entry of the conjugate is not positive")
    return m[0, 1] / m22, -math.log(m22), m[1, 0] / m22


def recompose(beta, alpha, sigma):
    return v(beta) @ a(alpha) @ u(sigma)


def divergence_table(disp, times):
    """Rows ``(t, |e11|, |e12|, |e21|, |e22|, dominant)`` with 1-based dominant index."""
    rows = []
    for t in times:
        m = np.abs(disp(t))
        i, j = np.unravel_index(np.argmax(m), m.shape)
        rows.append((t, m[0, 0], m[0, 1], m[1, 0], m[1, 1], f"{i + 1}{j + 1}"))
    return rows


def extension_table(degrees, deltas, length=1.0):
    """Rows ``(degree, delta, eps)`` for the monomials ``t^d`` on ``[0, length]``."""
    rows = []
    for d in degrees:
        coef = np.zeros(d + 1)
        coef[d] = 1.0
        for delta in deltas:
            rows.append((d, delta, polynomial_extension_factor(coef, 0.0, length, delta)))
    return rows


def write_extension_table(fh, rows):
    w = csv.writer(fh)
    w.writerow(["degree", "delta", "eps"])
    for d, delta, eps in rows:
        w.writerow([d, f"{delta:.12g}", "inf" if math.isinf(eps) else f"{eps:.12g}"])


def write_divergence_table(fh, rows):
    w = csv.writer(fh)
    w.writerow(["t", "e11", "e12", "e21", "e22", "dominant"])
    for r in rows:
        w.writerow([f"{x:.12g}" for x in r[:5]] + [r[5]])
