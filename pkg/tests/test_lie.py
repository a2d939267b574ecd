import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_sl
from homdyn.errors import InvalidInput, NotAnSl2Module, NotInvariant, NotRealDiagonalizable
from homdyn.groups import a, u
from homdyn.lie import (BUILTINS, abelian, compute_s_tilde, from_matrices, horospherical_subalgebra,
                        load_structure_constants, log_jacobian, restrict, s_tilde_case,
                        s_tilde_cases, s_tilde_test_residual, save_structure_constants, sl2,
                        sl2_module_structure, sl2_relation_residual, sl3, span, weight_decomposition)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_satisfy_jacobi(name):
    alg = BUILTINS[name]()
    assert alg.jacobi_residual() < 1e-10
    c = alg.constants
    np.testing.assert_allclose(c, -np.transpose(c, (1, 0, 2)))


def test_sl2_brackets():
    alg = sl2()
    uu, aa, vv = np.eye(3)
    np.testing.assert_allclose(alg.bracket(uu, aa), 2 * uu)
    np.testing.assert_allclose(alg.bracket(aa, vv), 2 * vv)
    np.testing.assert_allclose(alg.bracket(uu, vv), -aa)


def test_structure_constant_roundtrip(tmp_path):
    alg = sl3()
    path = tmp_path / "sl3.txt"
    save_structure_constants(alg, path)
    again = load_structure_constants(path)
    np.testing.assert_allclose(again.constants, alg.constants)


def test_structure_constant_file_rejects_non_jacobi(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("dim 3\n0 1 2 1\n1 2 0 1\n2 0 2 1\n")
    with pytest.raises(InvalidInput):
        load_structure_constants(path)


def test_weights_sl2():
    w = weight_decomposition(sl2(), np.diag([1.0, -1.0]))
    assert w.dims() == {-2.0: 1, 0.0: 1, 2.0: 1}


def test_weights_sl3():
    w = weight_decomposition(sl3(), np.diag([1.0, 0.0, -1.0]))
    assert w.dims() == {-2.0: 1, -1.0: 2, 0.0: 2, 1.0: 2, 2.0: 1}
    assert w.grading_residual() < 1e-9


def test_weights_abelian():
    alg = abelian(3)
    w = weight_decomposition(alg, np.array([1.0, 2.0, 3.0]))
    assert w.dims() == {0.0: 3}


def test_weights_reject_defective():
    with pytest.raises(NotRealDiagonalizable):
        weight_decomposition(sl2(), np.array([1.0, 0.0, 0.0]))


def test_horospherical():
    alg = sl2()
    h = horospherical_subalgebra(alg, a(0.5))
    assert h.same_span(span(alg, [[1.0, 0.0, 0.0]]))
    assert horospherical_subalgebra(alg, np.eye(2)).dim == 0
    big = sl3()
    h3 = horospherical_subalgebra(big, expm(np.diag([1.0, 0.0, -1.0])))
    lower = span(big, [big.coordinates(m) for m in s_tilde_cases()["full"][2]])
    assert h3.dim == 3 and h3.same_span(lower) and h3.is_subalgebra()


def test_log_jacobian():
    alg = sl2()
    for s in (0.1, 1.0, 3.0):
        h = horospherical_subalgebra(alg, a(s))
        assert log_jacobian(alg, a(s), h) == pytest.approx(2 * s, abs=1e-9)
        assert log_jacobian(alg, a(s), h) + log_jacobian(alg, a(-s), h) == pytest.approx(0, abs=1e-9)
    assert log_jacobian(alg, u(1.0), span(alg, [[1.0, 0, 0]])) == pytest.approx(0, abs=1e-12)
    assert log_jacobian(alg, a(1.0), span(alg, [])) == 0.0
    with pytest.raises(NotInvariant):
        restrict(alg.Ad(a(1.0)), span(alg, [[1.0, 0, 1.0]]))


def test_ad_is_conjugation_invariant(rng):
    alg = sl3()
    g = random_sl(rng, 3)
    x = rng.standard_normal(8)
    y = rng.standard_normal(8)
    lhs = alg.bracket(x, y) @ alg.Ad(g)
    rhs = alg.bracket(x @ alg.Ad(g), y @ alg.Ad(g))
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def _sl2_irrep(m):
    """Row-action matrices of the ``m+1``-dimensional representation."""
    n = m + 1
    ra = np.diag([2.0 * j - m for j in range(n)])
    ru = np.zeros((n, n))
    rv = np.zeros((n, n))
    for j in range(n):
        if j < m:
            ru[j, j + 1] = m - j
        if j > 0:
            rv[j, j - 1] = j
    return ra, ru, rv


def test_sl2_module_adjoint():
    alg = sl2()
    mod = sl2_module_structure(alg.ad(alg.element(np.diag([1.0, -1.0]))),
                               alg.ad(np.array([1.0, 0, 0])), alg.ad(np.array([0, 0, 1.0])))
    assert list(mod.lambdas) == [2]


def test_sl2_module_zero_and_standard():
    z = np.zeros((2, 2))
    assert sorted(sl2_module_structure(z, z, z).lambdas) == [0, 0]
    ra, ru, rv = _sl2_irrep(1)
    assert list(sl2_module_structure(ra, ru, rv).lambdas) == [1]


def test_sl2_module_direct_sum(rng):
    blocks = [_sl2_irrep(m) for m in (3, 1, 0)]
    mats = [np.zeros((7, 7)) for _ in range(3)]
    k = 0
    for blk in blocks:
        n = len(blk[0])
        for i in range(3):
            mats[i][k:k + n, k:k + n] = blk[i]
        k += n
    p = random_sl(rng, 7)
    pinv = np.linalg.inv(p)
    conj = [p @ m @ pinv for m in mats]
    mod = sl2_module_structure(*conj)
    assert sorted(mod.lambdas) == [0, 1, 3]
    assert sum(w + 1 for w in mod.lambdas) == 7
    assert sl2_relation_residual(mod, *conj) < 1e-8


def test_sl2_module_rejects_bad_relations():
    ra, ru, rv = _sl2_irrep(2)
    with pytest.raises(NotAnSl2Module):
        sl2_module_structure(ra, ru, 2 * rv)


DERIVED_DIMS = {"full": 8, "corner": 4, "column": 6, "principal": 3, "product": 3}


@pytest.mark.parametrize("name", sorted(DERIVED_DIMS))
def test_s_tilde_cases(name):
    alg, a_mat, U = s_tilde_cases()[name]
    sub = s_tilde_case(name)
    assert sub.dim == DERIVED_DIMS[name]
    assert sub.is_subalgebra()
    Ucoords = [alg.coordinates(m) for m in U]
    assert span(alg, Ucoords).dim == len(U)
    assert np.all(sub.residual(np.array(Ucoords)) < 1e-8)
    w = weight_decomposition(alg, alg.element(a_mat))
    for x in sub.basis:
        assert s_tilde_test_residual(alg, x, w, span(alg, Ucoords)) < 1e-8
    # ad a-invariance
    restrict(alg.ad(alg.element(a_mat)), sub)


@pytest.mark.parametrize("name", sorted(DERIVED_DIMS))
def test_s_tilde_maximal(name):
    alg, a_mat, U = s_tilde_cases()[name]
    sub = s_tilde_case(name)
    Us = span(alg, [alg.coordinates(m) for m in U])
    w = weight_decomposition(alg, alg.element(a_mat))
    for lam in w.weights:
        for x in w.space(lam):
            if sub.contains(x):
                continue
            assert s_tilde_test_residual(alg, x, w, Us) > 1e-6


def test_s_tilde_corner_pattern():
    sub = s_tilde_case("corner")
    alg = sl3()
    for m in (np.diag([1.0, 0, -1.0]), np.diag([0, 1.0, -1.0])):
        assert sub.contains(alg.coordinates(m))
    for i, j in ((1, 3), (3, 1)):
        e = np.zeros((3, 3))
        e[i - 1, j - 1] = 1
        assert sub.contains(alg.coordinates(e))
    for i, j in ((1, 2), (2, 1), (2, 3), (3, 2)):
        e = np.zeros((3, 3))
        e[i - 1, j - 1] = 1
        assert not sub.contains(alg.coordinates(e))


def test_principal_display_is_not_a_subalgebra():
    alg = sl3()
    vecs = [np.diag([1.0, -1.0, 0]), np.diag([0, 1.0, -1.0]),
            np.array([[0, 1.0, 0], [0, 0, 1.0], [0, 0, 0]]),
            np.array([[0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]])]
    displayed = span(alg, [alg.coordinates(m) for m in vecs])
    assert displayed.dim == 4
    assert not displayed.is_subalgebra()


def test_s_tilde_preconditions():
    alg = sl3()
    a1 = np.diag([1.0, 0, -1.0])
    with pytest.raises(InvalidInput):
        compute_s_tilde(alg, a1, [alg.coordinates(np.array([[0, 1.0, 0], [0, 0, 0], [0, 0, 0]]))])
    with pytest.raises(InvalidInput):
        mixed = np.zeros((3, 3))
        mixed[1, 0] = mixed[2, 0] = 1.0
        compute_s_tilde(alg, a1, [alg.coordinates(mixed)])


def test_from_matrices_closure_check():
    with pytest.raises(InvalidInput):
        from_matrices([np.array([[0, 1.0], [0, 0]]), np.array([[0, 0], [1.0, 0]])])
