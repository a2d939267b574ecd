"""Upper half-plane geometry and the modular group.

Two actions of SL(2,R) on H appear here:

* :func:`mobius_act` is the row-convention formula ``(a z + c)/(b z + d)``.
  It composes as a *right* action: ``act(g, act(h, z)) == act(h @ g, z)``.
* :func:`standard_mobius` is the usual left action ``(a z + b)/(c z + d)``,
  used for reduction to the fundamental domain.

Cosets ``Gamma g`` with ``Gamma = SL(2,Z)`` are tracked through
``zeta(g) = (c + i d)/(a + i b)``, the ratio of the two rows of ``g`` read
as complex numbers.  Left multiplication by an integer matrix ``gamma``
moves ``zeta`` by the standard action of ``K gamma K`` where ``K`` swaps
the coordinates, so ``zeta`` descends to a map ``Gamma\\G -> Gamma\\H``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (BoundaryDegenerate, DivergentRegion, InvalidInput,
                     NonConvergence, NumericUnderflow)
from .groups import check_unimodular, rotation
from .tolerances import FD_BOUNDARY

AREA_F = math.pi / 3
MAX_REDUCTION_STEPS = 10 ** 6


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 1e-300:
            raise InvalidInput(f"imaginary part must be positive, got {self.y!r}")

    @classmethod
    def from_complex(cls, z):
        return cls(float(z.real), float(z.imag))

    def __complex__(self):
        return complex(self.x, self.y)


def _as_point(z):
    if isinstance(z, HPoint):
        return z
    return HPoint.from_complex(complex(z))


def mobius_act(g, z):
    """Row-convention Mobius action ``(a z + c) / (b z + d)``."""
    g = check_unimodular(g)
    w = complex(_as_point(z))
    (a, b), (c, d) = g
    num, den = a * w + c, b * w + d
    image = num / den
    if not image.imag > 0:
        raise NumericUnderflow("image left the upper half-plane")
    return HPoint.from_complex(image)


def standard_mobius(gamma, z):
    """Left action ``(a z + b) / (c z + d)``."""
    (a, b), (c, d) = np.asarray(gamma, dtype=float)
    w = complex(_as_point(z))
    image = (a * w + b) / (c * w + d)
    if not image.imag > 0:
        raise NumericUnderflow("image left the upper half-plane")
    return HPoint.from_complex(image)


def hyperbolic_distance(z, w):
    z, w = complex(_as_point(z)), complex(_as_point(w))
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def zeta(g):
    """Point of H attached to ``g``: second row over first row, as complex numbers."""
    g = check_unimodular(g)
    den = complex(g[0, 0], g[0, 1])
    if den == 0:
        raise BoundaryDegenerate("first row of g is zero")
    return HPoint.from_complex(complex(g[1, 0], g[1, 1]) / den)


def swap_conjugate(gamma):
    """``K gamma K`` with ``K = [[0, 1], [1, 0]]``; satisfies ``zeta(gamma g) = swap_conjugate(gamma) . zeta(g)``."""
    (a, b), (c, d) = gamma
    return np.array([[d, c], [b, a]], dtype=np.asarray(gamma).dtype)


def in_fundamental_domain(z, tol=FD_BOUNDARY):
    """Closed fundamental domain ``|z| >= 1``, ``|Re z| <= 1/2``."""
    z = _as_point(z)
    return abs(z.x) <= 0.5 + tol and z.x * z.x + z.y * z.y >= 1.0 - tol


def _normalize_sign(gamma):
    """Choose the sign of ``gamma`` with ``c > 0``, or ``c == 0`` and ``d > 0``."""
    c, d = gamma[..., 1, 0], gamma[..., 1, 1]
    flip = (c < 0) | ((c == 0) & (d < 0))
    gamma = gamma.copy()
    gamma[flip] *= -1
    return gamma, flip


def reduce_rows(g, tol=FD_BOUNDARY, max_steps=MAX_REDUCTION_STEPS):
    """Vectorized Gauss reduction of the row lattices of ``g`` (shape ``(..., 2, 2)``).

    Returns ``(gamma, reduced)`` with integer ``gamma`` of determinant 1
    and ``reduced = gamma @ g`` whose ``zeta`` lies in the fundamental
    domain.  Boundary points are moved to ``Re z in [-1/2, 1/2)`` and, on
    the unit circle, to ``Re z <= 0``.
    """
    g = np.array(g, dtype=float)
    shape = g.shape[:-2]
    b1 = g[..., 0, :].reshape(-1, 2).copy()
    b2 = g[..., 1, :].reshape(-1, 2).copy()
    n = len(b1)
    gam = np.zeros((n, 2, 2), dtype=np.int64)
    gam[:, 0, 0] = gam[:, 1, 1] = 1
    active = np.ones(n, dtype=bool)
    for _ in range(max_steps):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        p, q = b1[idx], b2[idx]
        n1 = np.einsum("ij,ij->i", p, p)
        if np.any(n1 == 0):
            raise BoundaryDegenerate("degenerate lattice")
        re = np.einsum("ij,ij->i", p, q) / n1
        shift = np.floor(re + 0.5 + tol)
        moved = shift != 0
        if moved.any():
            q = q - shift[:, None] * p
            b2[idx] = q
            gam[idx, 1] -= shift.astype(np.int64)[:, None] * gam[idx, 0]
        n2 = np.einsum("ij,ij->i", q, q)
        re = np.einsum("ij,ij->i", p, q) / n1
        inside = n2 < n1 * (1.0 - tol)
        on_arc = (~inside) & (n2 <= n1 * (1.0 + tol)) & (re > tol)
        flip = inside | on_arc
        if flip.any():
            j = idx[flip]
            b1[j], b2[j] = b2[j].copy(), -b1[j]
            g0 = gam[j, 0].copy()
            gam[j, 0] = gam[j, 1]
            gam[j, 1] = -g0
        active[idx] = moved | flip
    else:
        raise NonConvergence("reduction did not terminate")
    reduced = np.stack([b1, b2], axis=1)
    gam, sign = _normalize_sign(gam)
    reduced[sign] *= -1
    return gam.reshape(shape + (2, 2)), reduced.reshape(shape + (2, 2))


def zeta_array(g):
    """Vectorized ``zeta`` returning ``(x, y)`` arrays."""
    g = np.asarray(g, dtype=float)
    den = g[..., 0, 0] + 1j * g[..., 0, 1]
    z = (g[..., 1, 0] + 1j * g[..., 1, 1]) / den
    return z.real, z.imag


def reduce_to_f(z):
    """Standard-action reduction: returns ``(z', gamma)`` with ``z' = gamma . z`` in the domain."""
    z = _as_point(z)
    rows = np.array([[1.0, 0.0], [z.x, z.y]])
    gam, _ = reduce_rows(rows)
    delta, _ = _normalize_sign(swap_conjugate(gam)[None])
    delta = delta[0]
    return standard_mobius(delta, z), _int_matrix(delta)


def _int_matrix(m):
    return tuple(tuple(int(e) for e in row) for row in m)


@dataclass(frozen=True)
class CosetRep:
    """Representative ``gamma @ g`` of the coset ``Gamma g`` with ``zeta`` in the domain."""

    g: np.ndarray
    gamma: tuple
    point: HPoint

    @property
    def reduced(self):
        return np.array(self.gamma, dtype=float) @ self.g


def reduce_coset(g):
    g = check_unimodular(g)
    gam, _ = reduce_rows(g)
    gamma = _int_matrix(gam)
    return CosetRep(g, gamma, zeta(np.array(gamma, dtype=float) @ g))


# --------------------------------------------------------------- areas

def _strip_area(x0, x1, y0, y1):
    """Exact hyperbolic area of ``[x0,x1] x [y0,y1]`` (``y1`` may be inf)."""
    if y0 <= 0:
        raise DivergentRegion("rectangle touches the real axis")
    top = 0.0 if math.isinf(y1) else 1.0 / y1
    return (x1 - x0) * (1.0 / y0 - top)


def hyperbolic_area(region="F", resolution=1e-4, y_cut=None):
    """Area under ``y^-2 dx dy``.

    ``region`` is either ``"F"`` (the fundamental domain) or an iterable of
    disjoint rectangles ``(x0, x1, y0, y1)`` with ``y0 > 0``; ``y1`` may be
    ``inf``.  For ``"F"`` the part below ``y_cut`` is integrated by adaptive
    quadrature and the cusp above contributes ``1/y_cut`` exactly.
    """
    if isinstance(region, str):
        if region != "F":
            raise InvalidInput(f"unknown region {region!r}")
        y_cut = 2.0 if y_cut is None else y_cut

        def inner(x):
            lo = math.sqrt(1.0 - x * x)
            return 1.0 / lo - 1.0 / y_cut

        body, _ = integrate.quad(inner, -0.5, 0.5, epsabs=resolution * 1e-4, epsrel=1e-12)
        return body + 1.0 / y_cut
    total = 0.0
    for x0, x1, y0, y1 in region:
        if x1 < x0 or y1 < y0:
            raise InvalidInput("rectangle corners are out of order")
        total += _strip_area(x0, x1, y0, y1)
    return total


def f_integral(func, y_cut=50.0):
    """Integral of ``func(x, y) y^-2`` over the fundamental domain (tail above ``y_cut`` by substitution)."""
    def body(y, x):
        return func(x, y) / (y * y)

    lower, _ = integrate.dblquad(body, -0.5, 0.5, lambda x: math.sqrt(1.0 - x * x), lambda x: y_cut,
                                 epsabs=1e-10, epsrel=1e-10)

    # y = y_cut / s maps the cusp to s in (0, 1]: y^-2 dy = ds / y_cut
    def tail(s, x):
        return func(x, y_cut / s) / y_cut

    upper, _ = integrate.dblquad(tail, -0.5, 0.5, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10)
    return lower + upper


def space_average(func, y_cut=50.0):
    """Average of an angle-independent function over Gamma\\G (hyperbolic measure on the domain)."""
    return f_integral(func, y_cut) / AREA_F


def fundamental_domain_polygon(height=3.0, arc_points=33):
    """Vertex list of the domain truncated at ``height``, counter-clockwise."""
    theta = np.linspace(2 * math.pi / 3, math.pi / 3, arc_points)
    arc = [(math.cos(t), math.sin(t)) for t in theta]
    return arc + [(0.5, height), (-0.5, height)]


# -------------------------------------------------------------- sampling

def point_to_group(x, y, angle=0.0):
    """Group element with ``zeta == x + iy``; ``angle`` is a right rotation."""
    s = math.sqrt(y)
    g = np.array([[1.0 / s, 0.0], [x / s, s]])
    return g @ rotation(angle)


def _sample_points(rng, count):
    xs, ys = [], []
    y_min = math.sqrt(3) / 2
    need = count
    while need > 0:
        batch = max(2 * need, 64)
        x = rng.uniform(-0.5, 0.5, batch)
        y = y_min / rng.uniform(0.0, 1.0, batch)
        keep = x * x + y * y >= 1.0
        xs.append(x[keep][:need])
        ys.append(y[keep][:need])
        need -= int(min(keep.sum(), need))
    return np.concatenate(xs), np.concatenate(ys)


def haar_sample(count, seed=0):
    """Draw ``count`` cosets from the invariant probability measure.

    Points of the domain come from rejection sampling against ``y^-2`` on
    the strip above ``y = sqrt(3)/2``; the angle is uniform.
    """
    if count < 0:
        raise InvalidInput("count must be non-negative")
    if count == 0:
        return []
    rng = np.random.default_rng(seed)
    x, y = _sample_points(rng, count)
    angle = rng.uniform(0.0, 2 * math.pi, count)
    out = []
    for xi, yi, ti in zip(x, y, angle):
        g = point_to_group(xi, yi, ti)
        out.append(CosetRep(g, ((1, 0), (0, 1)), HPoint(float(xi), float(yi))))
    return out


def write_point_cloud(path_or_file, reps):
    """CSV with columns ``x,y,angle`` (angle of the right rotation part)."""
    def _write(fh):
        w = csv.writer(fh)
        w.writerow(["x", "y", "angle"])
        for rep in reps:
            k = np.linalg.inv(point_to_group(rep.point.x, rep.point.y)) @ rep.reduced
            angle = math.atan2(k[0, 1], k[0, 0]) % (2 * math.pi)
            w.writerow([f"{rep.point.x:.12g}", f"{rep.point.y:.12g}", f"{angle:.12g}"])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
