"""Linear flows on tori and the geodesic/horocycle flows on SL(2,Z)\\SL(2,R).

Homogeneous orbits are integrated exactly in the group: every sample is
``g_base @ u(j dt)`` (or ``a(j dt)``) for a reduced base point, followed by
Gauss reduction, so the only approximation is floating-point rounding.
"""

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic
from .errors import BudgetExceeded, InvalidInput, NotHyperbolic
from .groups import a, check_unimodular, u

# ------------------------------------------------------------------ torus


@dataclass(frozen=True)
class TorusState:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.mod(np.asarray(self.x, dtype=float), 1.0)
        x[x >= 1.0] = 0.0
        v = np.asarray(self.v, dtype=float)
        if x.shape != v.shape or x.ndim != 1:
            raise InvalidInput("position and direction must be vectors of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return len(self.x)


def torus_step(state, t):
    """Flow for time ``t``: ``x + t v mod 1``."""
    return TorusState(state.x + t * state.v, state.v)


def torus_orbit(state, T, dt):
    """Sampled positions at times ``0, dt, ..., T`` (shape ``(N, n)``)."""
    times = np.arange(int(round(T / dt)) + 1) * dt
    pts = np.mod(state.x[None, :] + times[:, None] * state.v[None, :], 1.0)
    return times, pts


def torus_time_average(state, f, T, dt):
    """Trapezoidal average of ``f`` (vectorized over rows) along the orbit."""
    times, pts = torus_orbit(state, T, dt)
    return _trapezoid_mean(times, f(pts))


@dataclass(frozen=True)
class TorusClosure:
    dimension: int
    relations: tuple
    bound: int
    tol: float
    heuristic: bool = True


def _primitive_sign(m):
    nz = np.nonzero(m)[0]
    return m if nz.size == 0 or m[nz[0]] > 0 else -m


def torus_orbit_closure(v, bound=50, tol=1e-9, budget=5 * 10 ** 7):
    """Heuristic dimension of the closure of ``{t v}`` in the torus.

    Searches integer vectors ``m`` with ``|m|_inf <= bound`` and
    ``|m . v| < tol``.  Irrationality is never decided; the result only
    says no relation exists up to the given height.
    """
    v = np.asarray(v, dtype=float)
    n = len(v)
    if bound < 1 or tol <= 0:
        raise InvalidInput("bound must be >= 1 and tol > 0")
    side = 2 * bound + 1
    if side ** n > budget:
        raise BudgetExceeded(f"{side}^{n} candidate relations exceed the budget")
    rng = np.arange(-bound, bound + 1)
    hits = []
    # loop over the first coordinate to keep memory small
    rest = np.array(list(itertools.product(rng, repeat=n - 1)), dtype=np.int64).reshape(-1, n - 1)
    for m0 in rng:
        vals = m0 * v[0] + rest @ v[1:]
        ok = np.abs(vals) < tol
        for r in rest[ok]:
            m = np.concatenate([[m0], r])
            if np.any(m):
                hits.append(m)
    hits.sort(key=lambda m: (np.abs(m).max(), np.abs(m).sum(), tuple(-m)))
    chosen = []
    for m in hits:
        m = _primitive_sign(m)
        trial = np.array(chosen + [m])
        if np.linalg.matrix_rank(trial) == len(trial):
            chosen.append(m)
        if len(chosen) == n:
            break
    relations = tuple(tuple(int(e) for e in m) for m in chosen)
    return TorusClosure(n - len(chosen), relations, bound, tol)


def _box_ids(pts, boxes):
    frac = np.mod(np.round(np.mod(pts, 1.0), 9), 1.0)
    idx = np.floor(frac * boxes).astype(np.int64) % boxes
    return np.ravel_multi_index(idx.T, (boxes,) * pts.shape[1])


def closure_occupancy(v, x0=None, closure=None, boxes=20, T=2000.0, dt=0.01,
                      samples=200_000, seed=0):
    """Box-counting comparison of an orbit with its reported closure.

    Returns ``(inside, outside)``: the fraction of boxes meeting the
    reported subtorus that the orbit visits, and the fraction of the
    remaining boxes it visits.
    """
    v = np.asarray(v, dtype=float)
    n = len(v)
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    closure = closure or torus_orbit_closure(v)
    _, pts = torus_orbit(TorusState(x0, v), T, dt)
    visited = np.unique(_box_ids(pts, boxes))

    rel = np.array(closure.relations, dtype=float).reshape(-1, n)
    if closure.dimension == 0:
        sub = x0[None, :]
    else:
        if len(rel):
            _, _, vh = np.linalg.svd(rel)
            directions = vh[len(rel):]
        else:
            directions = np.eye(n)
        rng = np.random.default_rng(seed)
        coef = rng.uniform(0.0, 50.0, (samples, closure.dimension))
        sub = x0[None, :] + coef @ directions
    target = np.unique(_box_ids(sub, boxes))
    total = boxes ** n
    inside = np.isin(target, visited).mean()
    outside_boxes = total - len(target)
    stray = np.setdiff1d(visited, target).size
    return float(inside), (stray / outside_boxes if outside_boxes else 0.0)


# ------------------------------------------------------ homogeneous flows


@dataclass(frozen=True)
class HomogeneousOrbitSample:
    """Reduced representatives along a geodesic or horocycle orbit."""

    kind: str
    dt: float
    times: np.ndarray = field(repr=False)
    reps: np.ndarray = field(repr=False)   # (N, 2, 2), zeta in the domain
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.times)

    def rep(self, i):
        g = self.reps[i]
        return hyperbolic.CosetRep(g, ((1, 0), (0, 1)), hyperbolic.HPoint(float(self.x[i]), float(self.y[i])))

    def step_matrix(self, delta):
        return u(delta) if self.kind == "horocycle" else a(delta)


def _flow_matrix(kind):
    if kind == "horocycle":
        return u
    if kind == "geodesic":
        return a
    raise InvalidInput(f"unknown flow kind {kind!r}")


def _flow_mats(kind, ts):
    ts = np.asarray(ts, dtype=float)
    mats = np.zeros(ts.shape + (2, 2))
    if kind == "horocycle":
        mats[..., 0, 0] = mats[..., 1, 1] = 1.0
        mats[..., 1, 0] = ts
    else:
        mats[..., 0, 0] = np.exp(ts)
        mats[..., 1, 1] = np.exp(-ts)
    return mats


def homogeneous_orbit(kind, g0, T, dt, batch=None, period=None):
    """Sample the orbit ``Gamma g0 m(t)``, ``t = 0, dt, ..., T``.

    Samples are produced in batches ``base @ m(j dt)`` from the last reduced
    point.  Rounding errors grow like ``e^{2t}`` along geodesics, so a
    closed orbit drifts off after a few dozen time units; pass ``period``
    to sample ``g0 @ m(t mod period)`` directly instead.
    """
    _flow_matrix(kind)
    g0 = check_unimodular(g0)
    if T < 0 or (T > 0 and not dt > 0):
        raise InvalidInput("need dt > 0 and T >= 0")
    count = int(round(T / dt)) + 1 if T > 0 else 1
    times = np.arange(count) * dt
    if period is not None:
        if not period > 0:
            raise InvalidInput("period must be positive")
        reps = np.empty((count, 2, 2))
        for start in range(0, count, 65536):
            tt = np.mod(times[start:start + 65536], period)
            mats = _flow_mats(kind, tt)
            _, reps[start:start + len(tt)] = hyperbolic.reduce_rows(g0[None] @ mats)
        x, y = hyperbolic.zeta_array(reps)
        return HomogeneousOrbitSample(kind, float(dt), times, reps, x, y)
    if batch is None:
        reach = 2.0 if kind == "geodesic" else 40.0
        batch = int(min(4096, max(1, reach / dt))) if T > 0 else 1
    _, base = hyperbolic.reduce_rows(g0)
    reps = np.empty((count, 2, 2))
    reps[0] = base
    k = 1
    while k < count:
        j = np.arange(1, min(batch, count - k) + 1)
        mats = _flow_mats(kind, j * dt)
        _, red = hyperbolic.reduce_rows(base[None] @ mats)
        reps[k:k + len(j)] = red
        base = red[-1]
        k += len(j)
    x, y = hyperbolic.zeta_array(reps)
    return HomogeneousOrbitSample(kind, float(dt), times, reps, x, y)


def geodesic_orbit(g0, T, dt):
    return homogeneous_orbit("geodesic", g0, T, dt)


def horocycle_orbit(g0, T, dt):
    return homogeneous_orbit("horocycle", g0, T, dt)


def _trapezoid_mean(times, values):
    values = np.asarray(values, dtype=float)
    if len(values) == 1:
        return float(values[0])
    span = times[-1] - times[0]
    return float(np.trapezoid(values, times) / span)


def time_average(orbit, f, T=None):
    """Trapezoidal time average of ``f(x, y)`` over ``[0, T]`` (default: whole orbit)."""
    if len(orbit) == 0:
        raise InvalidInput("empty orbit")
    stop = len(orbit) if T is None else int(round(T / orbit.dt)) + 1
    return _trapezoid_mean(orbit.times[:stop], f(orbit.x[:stop], orbit.y[:stop]))


def smooth_indicator_below(h, width=0.02):
    """Smoothed indicator of ``y <= h``."""
    def f(x, y):
        return 0.5 * (1.0 - np.tanh((np.asarray(y) - h) / width))
    f.__name__ = f"below_{h:g}"
    return f


def constant(c=1.0):
    def f(x, y):
        return np.full(np.shape(y), float(c))
    f.__name__ = f"const_{c:g}"
    return f


@dataclass(frozen=True)
class EquidistributionRow:
    T: float
    name: str
    time_avg: float
    space_avg: float

    @property
    def deviation(self):
        return abs(self.time_avg - self.space_avg)


def equidistribution_report(kind, g0, functions, T_list, dt=0.01, space_averages=None, period=None):
    """Deviation of time averages from space averages for each ``(f, T)``.

    ``functions`` maps names to callables ``f(x, y)``.  Space averages are
    computed by quadrature over the fundamental domain unless supplied.
    Returns ``(rows, trend)`` with ``trend[T]`` the worst deviation at ``T``.
    """
    T_list = sorted(T_list)
    orbit = homogeneous_orbit(kind, g0, T_list[-1], dt, period=period)
    space_averages = dict(space_averages or {})
    rows = []
    for name, f in functions.items():
        if name not in space_averages:
            space_averages[name] = hyperbolic.space_average(lambda x, y, f=f: float(f(x, y)))
        for T in T_list:
            rows.append(EquidistributionRow(T, name, time_average(orbit, f, T), space_averages[name]))
    rows.sort(key=lambda r: (r.T, r.name))
    trend = {T: max(r.deviation for r in rows if r.T == T) for T in T_list}
    return rows, trend


def periodic_geodesic_basepoint(gamma):
    """Base point of the closed geodesic attached to a hyperbolic ``gamma`` in SL(2,Z).

    Returns ``(g0, period)`` with ``g0^-1 gamma g0 = a(period / 2)``;
    ``period = 2 log(lambda)`` is the hyperbolic length of the closed
    geodesic traced by ``zeta``.  ``Gamma g0 a(t)`` repeats after
    ``period / 2`` already, so ``period`` is a (possibly non-minimal) period.
    """
    gm = np.asarray(gamma)
    if gm.shape != (2, 2) or np.any(gm != np.round(gm)):
        raise InvalidInput("gamma must be an integer 2x2 matrix")
    gm = gm.astype(float)
    if abs(np.linalg.det(gm) - 1) > 1e-9:
        raise InvalidInput("gamma must have determinant 1")
    tr = np.trace(gm)
    if tr <= 2:
        raise NotHyperbolic(f"trace {tr:g} <= 2")
    lam = (tr + math.sqrt(tr * tr - 4)) / 2
    vals, vecs = np.linalg.eig(gm)
    order = np.argsort(-vals.real)
    g0 = vecs[:, order].real
    det = np.linalg.det(g0)
    if det < 0:
        g0[:, 1] *= -1
        det = -det
    g0 = g0 / math.sqrt(det)
    return g0, 2 * math.log(lam)


def nondivergence_fraction(orbit, h, T=None):
    """Fraction of sampled times with ``Im zeta > h``."""
    if h < 0:
        raise InvalidInput("height must be non-negative")
    stop = len(orbit) if T is None else int(round(T / orbit.dt)) + 1
    return float(np.mean(orbit.y[:stop] > h))


def closed_horocycle_fraction(y0, h):
    """Exact fraction of a closed horocycle at height ``y0`` lying above ``h >= 1``.

    The horocycle ``{x + i y0}`` meets the horoball of height ``h`` at
    ``d/c`` in an interval of ``x``-length ``2 sqrt(y0/h - c^2 y0^2) / c``.
    """
    if h < 1:
        raise InvalidInput("closed form needs h >= 1 (disjoint horoballs)")
    if y0 > h:
        return 1.0
    total = 0.0
    c = 1
    while c * c * y0 * h < 1.0:
        r = math.sqrt(y0 / h - c * c * y0 * y0)
        total += _euler_phi(c) * 2.0 * r / c
        c += 1
    return total


def _euler_phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def same_coset_point(z, w, tol=1e-8):
    """Compare reduced points allowing for the boundary identifications of the domain."""
    z, w = complex(z), complex(w)
    candidates = [z, z + 1, z - 1]
    if abs(abs(z) - 1.0) < 1e-6:
        candidates += [-1 / z, -1 / z + 1, -1 / z - 1]
    return any(abs(c - w) <= tol * max(1.0, abs(w)) for c in candidates)


# ------------------------------------------------------------------- CSV

def write_orbit_trace(fh, orbit, every=1):
    w = csv.writer(fh)
    w.writerow(["t", "x", "y"])
    for i in range(0, len(orbit), every):
        w.writerow([f"{orbit.times[i]:.12g}", f"{orbit.x[i]:.12g}", f"{orbit.y[i]:.12g}"])


def write_equidistribution(fh, rows):
    w = csv.writer(fh)
    w.writerow(["T", "f", "time_avg", "space_avg", "deviation"])
    for r in rows:
        w.writerow([f"{r.T:.12g}", r.name, f"{r.time_avg:.12g}", f"{r.space_avg:.12g}", f"{r.deviation:.12g}"])
