import io
import math

import numpy as np
import pytest

from conftest import random_sl
from homdyn.errors import InvalidInput, NotHyperbolic
from homdyn.flows import (TorusState, closed_horocycle_fraction, closure_occupancy, constant,
                          equidistribution_report, homogeneous_orbit, nondivergence_fraction,
                          periodic_geodesic_basepoint, same_coset_point, smooth_indicator_below,
                          time_average, torus_orbit_closure, torus_step, torus_time_average,
                          write_equidistribution, write_orbit_trace)
from homdyn.groups import a, u
from homdyn.hyperbolic import reduce_coset, zeta


def test_torus_step_examples():
    s = TorusState([0.2, 0.7], [1.0, 2.0])
    np.testing.assert_allclose(torus_step(s, 0.0).x, s.x)
    np.testing.assert_allclose(torus_step(TorusState([0, 0], [1, 2]), 1.0).x, [0, 0])
    np.testing.assert_allclose(torus_step(TorusState([0, 0], [math.sqrt(2), 1]), 1.0).x,
                               [math.sqrt(2) - 1, 0], atol=1e-12)


def test_torus_flow_law(rng):
    for _ in range(50):
        s = TorusState(rng.random(3), rng.normal(size=3))
        t1, t2 = rng.uniform(-5, 5, 2)
        lhs = torus_step(torus_step(s, t1), t2).x
        rhs = torus_step(s, t1 + t2).x
        d = np.abs(lhs - rhs)
        assert np.all(np.minimum(d, 1 - d) < 1e-12)


@pytest.mark.parametrize("v, dim, rel", [
    ((math.sqrt(2), 1, 0), 2, ((0, 0, 1),)),
    ((1, 2), 1, ((2, -1),)),
    ((0, 0), 0, None),
    ((1, math.sqrt(2), math.sqrt(3)), 3, ()),
])
def test_torus_closure(v, dim, rel):
    c = torus_orbit_closure(v, bound=50)
    assert c.dimension == dim and c.heuristic
    if rel is not None:
        assert c.relations == rel


@pytest.mark.parametrize("v", [(math.sqrt(2), 1, 0), (1, 2), (0, 0)])
def test_closure_occupancy(v):
    inside, outside = closure_occupancy(v)
    assert inside > 0.99 and outside < 0.01


def test_torus_averages():
    s = TorusState([0, 0], [math.sqrt(2), 1])
    avg = torus_time_average(s, lambda p: np.cos(2 * np.pi * p[:, 0]), 1e4, 0.01)
    assert abs(avg) < 0.02
    closed = TorusState([0, 0], [1, 1])
    avg = torus_time_average(closed, lambda p: np.cos(2 * np.pi * (p[:, 0] - p[:, 1])), 100, 0.01)
    assert avg == pytest.approx(1.0, abs=1e-12)


def test_orbit_zero_time():
    g0 = a(0.7) @ u(0.3)
    orbit = homogeneous_orbit("horocycle", g0, 0.0, 0.01)
    assert len(orbit) == 1
    rep = reduce_coset(g0)
    assert complex(orbit.x[0], orbit.y[0]) == pytest.approx(complex(rep.point))


def test_horocycle_from_identity_stays_at_height_one():
    orbit = homogeneous_orbit("horocycle", np.eye(2), 50.0, 0.01)
    np.testing.assert_allclose(orbit.y, 1.0, atol=1e-9)
    frac = np.mod(orbit.times + 0.5, 1.0) - 0.5
    ok = np.isclose(orbit.x, frac, atol=1e-9) | np.isclose(np.abs(orbit.x), 0.5, atol=1e-9)
    assert ok.all()


def test_geodesic_from_identity_runs_up_the_cusp():
    orbit = homogeneous_orbit("geodesic", np.eye(2), 5.0, 0.01)
    np.testing.assert_allclose(orbit.x, 0.0, atol=1e-9)
    np.testing.assert_allclose(orbit.y, np.exp(2 * orbit.times), rtol=1e-9)


@pytest.mark.parametrize("kind", ["horocycle", "geodesic"])
def test_consecutive_samples_differ_by_flow_step(kind, rng):
    g0 = random_sl(rng, 2)
    orbit = homogeneous_orbit(kind, g0, 3.0, 0.05)
    step = u(0.05) if kind == "horocycle" else a(0.05)
    for i in range(len(orbit) - 1):
        nxt = reduce_coset(orbit.reps[i] @ step).point
        assert same_coset_point(complex(nxt), complex(orbit.x[i + 1], orbit.y[i + 1]), 1e-8)


@pytest.mark.parametrize("kind", ["horocycle", "geodesic"])
def test_flow_law_on_quotient(kind, rng):
    m = u if kind == "horocycle" else a
    for _ in range(30):
        g0 = random_sl(rng, 2)
        t1, t2 = rng.uniform(0, 2, 2)
        first = homogeneous_orbit(kind, g0, t1, t1).reps[-1]
        two = homogeneous_orbit(kind, first, t2, t2)
        direct = reduce_coset(g0 @ m(t1 + t2)).point
        assert same_coset_point(complex(two.x[-1], two.y[-1]), complex(direct), 1e-8)


def test_representatives_stay_bounded(rng):
    orbit = homogeneous_orbit("horocycle", random_sl(rng, 2), 1e4, 0.01)
    assert np.abs(orbit.reps).max() < 100


def test_time_average_of_constant():
    orbit = homogeneous_orbit("horocycle", a(0.2), 10.0, 0.01)
    assert time_average(orbit, constant(3.5)) == 3.5


def test_equidistribution_constant_has_zero_deviation():
    rows, trend = equidistribution_report("horocycle", a(0.1), {"one": constant(1.0)}, [10.0, 20.0])
    assert all(r.deviation < 1e-8 for r in rows)
    assert set(trend) == {10.0, 20.0}


def test_generic_horocycle_equidistributes():
    g0 = np.array([[math.cos(1.0), math.sin(1.0)], [-math.sin(1.0), math.cos(1.0)]]) @ a(0.3)
    funcs = {"y<=2": smooth_indicator_below(2.0), "y<=1.5": smooth_indicator_below(1.5)}
    rows, trend = equidistribution_report("horocycle", g0, funcs, [1e4])
    assert trend[1e4] < 0.05


def test_periodic_geodesic_basepoint():
    g0, period = periodic_geodesic_basepoint(np.array([[2, 1], [1, 1]]))
    assert period == pytest.approx(2 * math.log((3 + math.sqrt(5)) / 2))
    assert np.linalg.det(g0) == pytest.approx(1.0)
    with pytest.raises(NotHyperbolic):
        periodic_geodesic_basepoint(np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("gamma", [[[2, 1], [1, 1]], [[5, 2], [2, 1]]])
def test_periodic_geodesic_closes(gamma):
    g0, period = periodic_geodesic_basepoint(np.array(gamma))
    start = reduce_coset(g0).point
    end = reduce_coset(g0 @ a(period)).point
    assert same_coset_point(complex(start), complex(end), 1e-6)


def test_periodic_geodesic_stays_low():
    g0, period = periodic_geodesic_basepoint(np.array([[2, 1], [1, 1]]))
    orbit = homogeneous_orbit("geodesic", g0, 200.0, 0.01, period=period)
    assert orbit.y.max() <= math.sqrt(5) / 2 + 1e-6


def test_nondivergence_fraction_basics():
    orbit = homogeneous_orbit("horocycle", a(0.2), 20.0, 0.01)
    assert nondivergence_fraction(orbit, 0.5) == 1.0
    with pytest.raises(InvalidInput):
        nondivergence_fraction(orbit, -1.0)


def test_closed_horocycle_fraction_matches_orbit():
    s = 1.5
    y0, period = math.exp(-2 * s), math.exp(2 * s)
    orbit = homogeneous_orbit("horocycle", a(s), period, period / 200000)
    for h in (1.0, 1.5, 3.0):
        exact = closed_horocycle_fraction(y0, h)
        assert nondivergence_fraction(orbit, h) == pytest.approx(exact, abs=2e-4)


def test_closed_horocycle_total_length():
    # a closed horocycle above h lies entirely above it
    assert closed_horocycle_fraction(2.0, 1.5) == 1.0
    with pytest.raises(InvalidInput):
        closed_horocycle_fraction(0.1, 0.5)


def test_csv_writers():
    orbit = homogeneous_orbit("horocycle", np.eye(2), 0.05, 0.01)
    buf = io.StringIO()
    write_orbit_trace(buf, orbit)
    assert buf.getvalue().splitlines()[0] == "t,x,y"
    rows, _ = equidistribution_report("horocycle", np.eye(2), {"one": constant()}, [0.05], space_averages={"one": 1.0})
    buf = io.StringIO()
    write_equidistribution(buf, rows)
    assert buf.getvalue().splitlines()[0] == "T,f,time_avg,space_avg,deviation"


def test_zeta_of_orbit_rep_matches_point(rng):
    orbit = homogeneous_orbit("geodesic", random_sl(rng, 2), 2.0, 0.1)
    for i in range(len(orbit)):
        assert complex(zeta(orbit.reps[i])) == pytest.approx(complex(orbit.x[i], orbit.y[i]))
