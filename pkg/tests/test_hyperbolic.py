import io
import itertools
import math

import numpy as np
import pytest

from conftest import random_sl
from homdyn.errors import DivergentRegion, InvalidInput
from homdyn.groups import a, u
from homdyn.hyperbolic import (AREA_F, HPoint, fundamental_domain_polygon, haar_sample,
                               hyperbolic_area, hyperbolic_distance, in_fundamental_domain,
                               mobius_act, reduce_coset, reduce_rows, reduce_to_f, space_average,
                               standard_mobius, swap_conjugate, write_point_cloud, zeta)


def _pt(z):
    return complex(z)


def test_point_requires_positive_height():
    with pytest.raises(InvalidInput):
        HPoint(0.0, 0.0)


def test_mobius_examples():
    assert _pt(mobius_act(np.eye(2), 0.3 + 2j)) == pytest.approx(0.3 + 2j)
    assert _pt(mobius_act(u(1.7), 1j)) == pytest.approx(1.7 + 1j)
    assert _pt(mobius_act(a(0.4), 1j)) == pytest.approx(math.exp(0.8) * 1j)


def test_mobius_is_right_action(rng):
    for _ in range(100):
        g, h = random_sl(rng, 2), random_sl(rng, 2)
        z = complex(rng.normal(), rng.uniform(0.2, 3))
        lhs = _pt(mobius_act(g, mobius_act(h, z)))
        assert lhs == pytest.approx(_pt(mobius_act(h @ g, z)), rel=1e-10, abs=1e-10)


def test_mobius_is_isometry(rng):
    for _ in range(300):
        g = random_sl(rng, 2)
        z = complex(rng.normal(), rng.uniform(0.2, 3))
        w = complex(rng.normal(), rng.uniform(0.2, 3))
        d0 = hyperbolic_distance(z, w)
        d1 = hyperbolic_distance(mobius_act(g, z), mobius_act(g, w))
        assert d1 == pytest.approx(d0, abs=1e-9)


def test_zeta_examples():
    assert _pt(zeta(np.eye(2))) == pytest.approx(1j)
    assert _pt(zeta(a(0.3))) == pytest.approx(math.exp(-0.6) * 1j)


def test_zeta_equivariance(rng):
    gammas = [np.array([[1, 1], [0, 1]]), np.array([[0, -1], [1, 0]]), np.array([[2, 1], [1, 1]])]
    for gam in gammas:
        g = random_sl(rng, 2)
        lhs = _pt(zeta(gam @ g))
        rhs = _pt(standard_mobius(swap_conjugate(gam), zeta(g)))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("z, inside", [(1j, True), (0.6 + 2j, False), (0.3 + 0.5j, False),
                                       (-0.5 + math.sqrt(3) / 2 * 1j, True)])
def test_fundamental_domain_membership(z, inside):
    assert in_fundamental_domain(z) is inside


def test_reduce_to_f_examples():
    z, gam = reduce_to_f(1j)
    assert _pt(z) == pytest.approx(1j) and gam == ((1, 0), (0, 1))
    z, gam = reduce_to_f(0.5j)
    assert _pt(z) == pytest.approx(2j) and gam == ((0, -1), (1, 0))


def _words(depth):
    T, S = np.array([[1, 1], [0, 1]]), np.array([[0, -1], [1, 0]])
    Ti = np.array([[1, -1], [0, 1]])
    seen = {((1, 0), (0, 1))}
    frontier = [np.eye(2, dtype=int)]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for gen in (T, Ti, S):
                w = gen @ m
                key = tuple(map(tuple, w))
                if key not in seen:
                    seen.add(key)
                    nxt.append(w)
        frontier = nxt
        yield from nxt


def test_reduce_matches_word_search():
    z0 = 10.3 + 0.07j
    z, gam = reduce_to_f(z0)
    assert in_fundamental_domain(z)
    assert _pt(standard_mobius(gam, z0)) == pytest.approx(_pt(z))
    assert np.linalg.det(np.array(gam)) == pytest.approx(1)
    found = None
    for w in itertools.islice(_words(40), 200000):
        cand = standard_mobius(w, z0)
        if in_fundamental_domain(cand, tol=1e-9):
            found = cand
            break
    assert found is not None and _pt(found) == pytest.approx(_pt(z), abs=1e-9)


def test_reduction_equivariance(rng):
    for _ in range(200):
        z0 = complex(rng.uniform(-3, 3), rng.uniform(0.05, 2))
        gam = np.array([[1, 0], [0, 1]])
        for _ in range(4):
            gam = gam @ (np.array([[1, int(rng.integers(-3, 4))], [0, 1]]) @ np.array([[0, -1], [1, 0]]))
        w = standard_mobius(gam, z0)
        za, _ = reduce_to_f(z0)
        zb, _ = reduce_to_f(w)
        if abs(abs(_pt(za)) - 1) < 1e-6 or abs(abs(za.x) - 0.5) < 1e-6:
            continue
        assert _pt(za) == pytest.approx(_pt(zb), abs=1e-8)


def test_reduce_coset_properties(rng):
    rep = reduce_coset(np.eye(2))
    assert rep.gamma == ((1, 0), (0, 1))
    rep = reduce_coset(a(5.0))
    assert in_fundamental_domain(rep.point)
    assert _pt(zeta(rep.reduced)) == pytest.approx(_pt(rep.point))
    for _ in range(50):
        g = random_sl(rng, 2, scale=2.0)
        rep = reduce_coset(g)
        assert in_fundamental_domain(rep.point)
        again = reduce_coset(rep.reduced)
        assert again.gamma in (((1, 0), (0, 1)), ((-1, 0), (0, -1)))
        gam0 = np.array([[2, 3], [1, 2]])
        other = reduce_coset(gam0 @ g)
        assert _pt(other.point) == pytest.approx(_pt(rep.point), abs=1e-9)


def test_reduce_rows_vectorized(rng):
    gs = np.stack([random_sl(rng, 2, 3.0) for _ in range(20)])
    gam, red = reduce_rows(gs)
    np.testing.assert_allclose(gam @ gs, red, atol=1e-9)
    assert np.all(np.round(np.linalg.det(gam)) == 1)


def test_area():
    assert hyperbolic_area("F") == pytest.approx(math.pi / 3, abs=1e-10)
    assert hyperbolic_area([(0, 1, 1, math.inf)]) == pytest.approx(1.0)
    assert hyperbolic_area([]) == 0.0
    parts = [(0, 1, 1, 2), (0, 1, 2, math.inf)]
    assert hyperbolic_area(parts) == pytest.approx(hyperbolic_area([(0, 1, 1, math.inf)]))
    with pytest.raises(DivergentRegion):
        hyperbolic_area([(0, 1, 0, 1)])


def test_space_average_of_constant():
    assert space_average(lambda x, y: 1.0) == pytest.approx(1.0, abs=1e-8)


def test_haar_sample_reproducible_and_distributed():
    s1, s2 = haar_sample(5, seed=7), haar_sample(5, seed=7)
    np.testing.assert_array_equal(s1[0].g, s2[0].g)
    assert haar_sample(0) == []
    sample = haar_sample(20000, seed=3)
    assert all(in_fundamental_domain(r.point) for r in sample[:500])
    below = np.mean([r.point.y <= 2 for r in sample])
    exact = 1 - 1 / (2 * AREA_F)   # the cusp above y = 2 has area 1/2
    sigma = math.sqrt(exact * (1 - exact) / len(sample))
    assert abs(below - exact) < 3 * sigma


def test_haar_sample_rep_has_right_point():
    for rep in haar_sample(20, seed=1):
        assert _pt(zeta(rep.g)) == pytest.approx(_pt(rep.point))


def test_point_cloud_csv():
    buf = io.StringIO()
    write_point_cloud(buf, haar_sample(3, seed=2))
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "x,y,angle" and len(lines) == 4


def test_polygon_closed_shape():
    poly = fundamental_domain_polygon()
    assert poly[0] == pytest.approx((-0.5, math.sqrt(3) / 2))
    assert all(x * x + y * y >= 1 - 1e-12 for x, y in poly)
