"""Finite-dimensional real Lie algebras given by structure constants.

Elements are coordinate vectors with respect to a fixed basis.  Operators
act on the right of row vectors, matching the group convention: the matrix
``ad(y)`` satisfies ``x @ ad(y) == bracket(x, y)``, and ``Ad(g)`` is
conjugation ``X -> g^-1 X g``.  With this convention the weight spaces of
``a`` are ``{x : [x, a] = lam x}``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .errors import (InvalidInput, NotAnSl2Module, NotInvariant,
                     NotRealDiagonalizable)
from .tolerances import RANK_TOL, SUBSPACE_RESIDUAL, WEIGHT_SNAP


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants ``c[i, j, k]`` with ``[e_i, e_j] = sum_k c[i,j,k] e_k``.

    ``matrices`` optionally realizes each basis vector in a defining
    representation; it is required for group-element arguments.
    """

    constants: np.ndarray
    labels: tuple = ()
    matrices: np.ndarray = None
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.constants, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise InvalidInput("structure constants must have shape (n, n, n)")
        object.__setattr__(self, "constants", c)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(c.shape[0])))
        if self.matrices is not None:
            object.__setattr__(self, "matrices", np.asarray(self.matrices, dtype=float))

    @property
    def dim(self):
        return self.constants.shape[0]

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.constants)

    def ad(self, y):
        """Matrix of ``x -> [x, y]`` acting on row vectors."""
        return np.einsum("j,ijk->ik", np.asarray(y, dtype=float), self.constants)

    def basis_vector(self, i):
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def to_matrix(self, x):
        self._need_matrices()
        return np.tensordot(x, self.matrices, axes=1)

    def coordinates(self, m):
        """Coordinates of a matrix in the span of the realization."""
        self._need_matrices()
        flat = self.matrices.reshape(self.dim, -1)
        target = np.asarray(m, dtype=float).ravel()
        coef, *_ = np.linalg.lstsq(flat.T, target, rcond=None)
        resid = np.abs(coef @ flat - target).max()
        if resid > 1e-8 * max(1.0, np.abs(target).max()):
            raise InvalidInput("matrix is not in the Lie algebra")
        return coef

    def Ad(self, g):
        """Matrix of ``x -> g^-1 x g`` for a group element ``g``.

        ``g`` may be a matrix in the defining representation, or a coordinate
        vector ``X`` standing for ``exp(X)`` (usable without a realization).
        """
        g = np.asarray(g, dtype=float)
        if g.ndim == 1:
            return expm(self.ad(g))
        self._need_matrices()
        ginv = np.linalg.inv(g)
        return np.array([self.coordinates(ginv @ m @ g) for m in self.matrices])

    def element(self, m):
        """Accept either coordinates or a defining-representation matrix."""
        m = np.asarray(m, dtype=float)
        return m if m.ndim == 1 else self.coordinates(m)

    def jacobi_residual(self):
        c = self.constants
        # [[e_i,e_j],e_k] + cyclic
        t = np.einsum("ijm,mkl->ijkl", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return np.abs(cyc).max()

    def _need_matrices(self):
        if self.matrices is None:
            raise InvalidInput(f"Lie algebra {self.name!r} has no matrix realization")


def from_matrices(mats, labels=(), name=""):
    """Build structure constants from a basis of matrices closed under commutator."""
    mats = np.asarray(mats, dtype=float)
    n = len(mats)
    flat = mats.reshape(n, -1)
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            comm = (mats[i] @ mats[j] - mats[j] @ mats[i]).ravel()
            coef, *_ = np.linalg.lstsq(flat.T, comm, rcond=None)
            if np.abs(coef @ flat - comm).max() > 1e-10:
                raise InvalidInput("matrices are not closed under commutator")
            c[i, j] = coef
    c[np.abs(c) < 1e-14] = 0.0
    return LieAlgebra(c, tuple(labels), mats, name)


def _unit(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def sl2():
    """sl(2,R) with basis ``(u, a, v)``: ``u = E21``, ``a = diag(1,-1)``, ``v = E12``."""
    mats = [_unit(2, 1, 0), np.diag([1.0, -1.0]), _unit(2, 0, 1)]
    return from_matrices(mats, ("u", "a", "v"), "sl2")


def sl3():
    """sl(3,R): off-diagonal units ``Eij`` then ``H1 = E11-E22``, ``H2 = E22-E33``."""
    mats, labels = [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                mats.append(_unit(3, i, j))
                labels.append(f"E{i + 1}{j + 1}")
    mats += [np.diag([1.0, -1.0, 0.0]), np.diag([0.0, 1.0, -1.0])]
    labels += ["H1", "H2"]
    return from_matrices(mats, labels, "sl3")


def sl2_sum():
    """sl(2,R) + sl(2,R) realized block-diagonally in 4x4 matrices."""
    base = sl2()
    mats, labels = [], []
    for side in (0, 1):
        for lab, m in zip(base.labels, base.matrices):
            big = np.zeros((4, 4))
            big[2 * side:2 * side + 2, 2 * side:2 * side + 2] = m
            mats.append(big)
            labels.append(f"{lab}{side + 1}")
    return from_matrices(mats, labels, "sl2+sl2")


def abelian(n):
    return LieAlgebra(np.zeros((n, n, n)), name=f"abelian{n}")


BUILTINS = {"sl2": sl2, "sl3": sl3, "sl2+sl2": sl2_sum}


def load_structure_constants(path, name=None):
    """Read a plain-text structure-constant file.

    Each non-comment line is ``i j k c`` (0-based indices) meaning
    ``[e_i, e_j]`` has ``c`` as its ``e_k`` coefficient.  A line
    ``dim n`` fixes the dimension; otherwise it is inferred.  Entries
    given only for ``(i, j)`` are mirrored to ``(j, i)`` with opposite sign.
    """
    text = Path(path).read_text()
    entries, dim = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            dim = int(parts[1])
            continue
        if len(parts) != 4:
            raise InvalidInput(f"{path}:{lineno}: expected 'i j k c'")
        i, j, k = (int(p) for p in parts[:3])
        entries.append((i, j, k, float(parts[3])))
    if dim is None:
        dim = 1 + max((max(e[:3]) for e in entries), default=-1)
    c = np.zeros((dim, dim, dim))
    given = np.zeros((dim, dim, dim), dtype=bool)
    for i, j, k, val in entries:
        c[i, j, k] = val
        given[i, j, k] = True
    for i, j, k in zip(*np.nonzero(given)):
        if given[j, i, k]:
            if abs(c[i, j, k] + c[j, i, k]) > 1e-12:
                raise InvalidInput(f"constants for [{i},{j}] and [{j},{i}] are not antisymmetric")
        else:
            c[j, i, k] = -c[i, j, k]
    alg = LieAlgebra(c, name=name or Path(path).stem)
    if alg.jacobi_residual() > 1e-10:
        raise InvalidInput("structure constants violate the Jacobi identity")
    return alg


def save_structure_constants(alg, path):
    lines = [f"dim {alg.dim}"]
    for i, j, k in zip(*np.nonzero(alg.constants)):
        if i < j:
            lines.append(f"{i} {j} {k} {alg.constants[i, j, k]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- subspaces

@dataclass(frozen=True)
class Subalgebra:
    """Subspace of a Lie algebra, stored as an orthonormal row basis."""

    ambient: LieAlgebra
    basis: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return len(self.basis)

    def residual(self, x):
        """Distance from ``x`` (or each row of ``x``) to the span."""
        x = np.atleast_2d(x)
        if self.dim == 0:
            return np.linalg.norm(x, axis=1)
        proj = x @ self.basis.T @ self.basis
        return np.linalg.norm(x - proj, axis=1)

    def contains(self, x, tol=SUBSPACE_RESIDUAL):
        return bool(np.all(self.residual(x) <= tol))

    def closure_residual(self):
        """Largest distance of a bracket of basis vectors from the span."""
        worst = 0.0
        for x in self.basis:
            for y in self.basis:
                worst = max(worst, float(self.residual(self.ambient.bracket(x, y))[0]))
        return worst

    def is_subalgebra(self, tol=1e-9):
        return self.closure_residual() <= tol

    def same_span(self, other, tol=SUBSPACE_RESIDUAL):
        return self.dim == other.dim and self.contains(other.basis, tol) and other.contains(self.basis, tol)


def orthonormal_span(vectors, dim, tol=RANK_TOL):
    """Orthonormal row basis of the span of ``vectors`` in R^dim."""
    vectors = np.asarray(vectors, dtype=float).reshape(-1, dim)
    if len(vectors) == 0:
        return np.zeros((0, dim))
    _, s, vh = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, dim))
    rank = int(np.sum(s > tol * s[0]))
    return vh[:rank]


def span(alg, vectors):
    return Subalgebra(alg, orthonormal_span(vectors, alg.dim))


def _left_null(m, atol=RANK_TOL):
    """Orthonormal rows ``x`` with ``x @ m == 0`` (singular values <= ``atol`` count as zero)."""
    rows = m.shape[0]
    if m.size == 0:
        return np.eye(rows)
    u_, s, _ = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > atol))
    return u_[:, rank:].T


# -------------------------------------------------------- weight spaces

@dataclass(frozen=True)
class WeightDecomposition:
    """Eigenspaces ``{lam: basis rows}`` of ``x -> [x, a]``."""

    algebra: LieAlgebra
    spaces: dict

    @property
    def weights(self):
        return sorted(self.spaces)

    def dims(self):
        return {lam: len(b) for lam, b in self.spaces.items()}

    def space(self, lam):
        return self.spaces.get(lam, np.zeros((0, self.algebra.dim)))

    def part(self, sign):
        """Sum of the spaces with positive (``+1``), negative (``-1``) or zero weight."""
        rows = [b for lam, b in self.spaces.items() if np.sign(lam) == sign]
        return span(self.algebra, np.vstack(rows) if rows else [])

    def grading_residual(self):
        worst = 0.0
        for l1, b1 in self.spaces.items():
            for l2, b2 in self.spaces.items():
                target = span(self.algebra, self.space(_snap(l1 + l2)))
                for x in b1:
                    for y in b2:
                        worst = max(worst, float(target.residual(self.algebra.bracket(x, y))[0]))
        return worst


def _snap(lam, tol=WEIGHT_SNAP):
    r = round(lam)
    return float(r) if abs(lam - r) <= tol else float(lam)


def _real_eigenspaces(op, tol=WEIGHT_SNAP, snap=True):
    """Eigenspaces of ``x -> x @ op``; raises unless real-diagonalizable."""
    n = op.shape[0]
    eig = np.linalg.eigvals(op.T)
    scale = max(1.0, np.abs(op).max())
    if np.any(np.abs(eig.imag) > 1e-7 * scale):
        raise NotRealDiagonalizable("operator has non-real eigenvalues")
    values = []
    for lam in np.sort(eig.real):
        lam = _snap(lam, tol) if snap else lam
        if not values or abs(lam - values[-1]) > 1e-6 * max(1.0, abs(lam)):
            values.append(lam)
    spaces, total = {}, 0
    for lam in values:
        basis = _left_null(op - lam * np.eye(n), atol=1e-7 * scale)
        if len(basis) == 0:
            continue
        spaces[lam] = basis
        total += len(basis)
    if total != n:
        raise NotRealDiagonalizable(f"operator is defective ({total} eigenvectors for dimension {n})")
    return spaces


def weight_decomposition(alg, a):
    """Weight spaces of ``ad a`` on ``alg``; ``a`` as coordinates or matrix."""
    a = alg.element(a)
    return WeightDecomposition(alg, _real_eigenspaces(alg.ad(a)))


def horospherical_subalgebra(alg, g):
    """Span of the eigenspaces of ``Ad g`` with eigenvalue modulus > 1."""
    spaces = _real_eigenspaces(alg.Ad(g), snap=False)
    rows = [b for lam, b in spaces.items() if abs(lam) > 1.0 + 1e-9]
    return span(alg, np.vstack(rows) if rows else [])


def restrict(op, sub, tol=SUBSPACE_RESIDUAL):
    """Matrix of ``op`` restricted to an invariant subspace (in ``sub.basis`` coordinates)."""
    image = sub.basis @ op
    coef = image @ sub.basis.T
    resid = np.abs(coef @ sub.basis - image).max() if sub.dim else 0.0
    if resid > tol * max(1.0, np.abs(op).max()):
        raise NotInvariant(f"subspace is not invariant (residual {resid:.3g})")
    return coef


def log_jacobian(alg, g, sub):
    """Sum of log|eigenvalue| of ``Ad g`` on the invariant subspace ``sub``."""
    if sub.dim == 0:
        return 0.0
    r = restrict(alg.Ad(g), sub)
    _, logdet = np.linalg.slogdet(r)
    return float(logdet)


# ------------------------------------------------------------ sl2 modules

@dataclass(frozen=True)
class Sl2Module:
    """Adapted basis ``w[i][j]`` (row vectors) for highest weights ``lambdas[i]``."""

    lambdas: tuple
    basis: tuple

    def flat_basis(self):
        return np.vstack([np.vstack(ws) for ws in self.basis])


def _bracket_residual(x, y, target):
    return np.abs(x @ y - y @ x - target).max()


def sl2_module_structure(rho_a, rho_u, rho_v, tol=1e-8):
    """Decompose a representation of sl(2,R) into irreducible strings.

    The three arguments are the matrices by which ``a``, ``u``, ``v`` act on
    row vectors.  Returns highest weights ``lambda_i`` and vectors
    ``w[i][j]``, ``0 <= j <= lambda_i``, with

    * ``w[i][j] @ rho_a == (2j - lambda_i) w[i][j]``
    * ``w[i][j] @ rho_u == (lambda_i - j) w[i][j+1]``
    * ``w[i][j] @ rho_v == j w[i][j-1]``
    """
    A, U, V = (np.asarray(m, dtype=float) for m in (rho_a, rho_u, rho_v))
    scale = max(1.0, np.abs(A).max(), np.abs(U).max(), np.abs(V).max())
    if (_bracket_residual(U, A, 2 * U) > tol * scale
            or _bracket_residual(V, A, -2 * V) > tol * scale
            or _bracket_residual(V, U, A) > tol * scale):
        raise NotAnSl2Module("action matrices violate the sl(2) bracket relations")
    n = A.shape[0]
    kernel = _left_null(U, atol=1e-9 * scale)
    # a preserves ker(u); split it into a-eigenspaces (the highest weights)
    if len(kernel):
        restricted = kernel @ A @ kernel.T
        spaces = _real_eigenspaces(restricted)
    else:
        spaces = {}
    lambdas, strings = [], []
    for lam in sorted(spaces, reverse=True):
        if lam < 0 or lam != int(lam):
            raise NotAnSl2Module(f"highest weight {lam} is not a natural number")
        lam = int(lam)
        for coeffs in spaces[lam]:
            top = coeffs @ kernel
            chain = [top]
            for j in range(lam, 0, -1):
                chain.append(chain[-1] @ V / j)
            lambdas.append(lam)
            strings.append(tuple(reversed(chain)))
    if sum(l + 1 for l in lambdas) != n:
        raise NotAnSl2Module("weight strings do not span the module")
    return Sl2Module(tuple(lambdas), tuple(strings))


def sl2_relation_residual(module, rho_a, rho_u, rho_v):
    worst = 0.0
    for lam, ws in zip(module.lambdas, module.basis):
        for j, w in enumerate(ws):
            worst = max(worst, np.abs(w @ rho_a - (2 * j - lam) * w).max())
            up = ws[j + 1] if j < lam else np.zeros_like(w)
            worst = max(worst, np.abs(w @ rho_u - (lam - j) * up).max())
            down = ws[j - 1] if j > 0 else np.zeros_like(w)
            worst = max(worst, np.abs(w @ rho_v - j * down).max())
    return worst


def adjoint_rep(alg, x):
    return alg.ad(alg.element(x))


# ------------------------------------------------------------- S-tilde

def _largest_invariant_subspace(basis, ops, dim):
    """Largest subspace of span(basis) mapped into itself by every op."""
    current = basis
    scale = max([1.0] + [np.abs(op).max() for op in ops])
    while True:
        if len(current) == 0:
            return current
        proj_out = np.eye(dim) - current.T @ current
        stacked = np.hstack([current @ op @ proj_out for op in ops]) if ops else np.zeros((len(current), 0))
        coeffs = _left_null(stacked, atol=RANK_TOL * scale)
        nxt = orthonormal_span(coeffs @ current, dim) if len(coeffs) else np.zeros((0, dim))
        if len(nxt) == len(current):
            return nxt
        current = nxt


def s_tilde_test_residual(alg, x, weights, U):
    """Worst distance of ``x (ad u)^k`` from ``g_- + g_0 + U`` over basis ``u`` of ``U`` and ``k <= dim``."""
    target = span(alg, np.vstack([weights.part(-1).basis, weights.part(0).basis, U.basis]))
    worst = 0.0
    for uu in U.basis:
        ad_u = alg.ad(uu)
        y = np.asarray(x, dtype=float)
        for _ in range(alg.dim + 1):
            worst = max(worst, float(target.residual(y)[0]))
            y = y @ ad_u
    return worst


def compute_s_tilde(alg, a, U):
    """The subalgebra of ``x`` with ``x (ad u)^k in g_- + g_0 + U`` for all ``u`` in ``U``.

    ``U`` must be an ``ad a``-invariant subspace of the positive-weight part.
    The test for every ``u`` in ``U`` and every ``k`` is equivalent to the
    largest subspace of ``g_- + g_0 + U`` invariant under ``ad u_i`` for a
    basis ``u_i``: symmetrized words in the ``ad u_i`` span the same operator
    algebra as all words.
    """
    a = alg.element(a)
    if not isinstance(U, Subalgebra):
        U = span(alg, U)
    weights = weight_decomposition(alg, a)
    plus = weights.part(1)
    if U.dim and not plus.contains(U.basis):
        raise InvalidInput("U is not contained in the positive-weight part")
    if U.dim:
        try:
            restrict(alg.ad(a), U)
        except NotInvariant:
            raise InvalidInput("U is not ad a-invariant") from None
    allowed = orthonormal_span(np.vstack([weights.part(-1).basis, weights.part(0).basis, U.basis]), alg.dim)
    ops = [alg.ad(uu) for uu in U.basis]
    return Subalgebra(alg, _largest_invariant_subspace(allowed, ops, alg.dim))


def s_tilde_cases():
    """Worked inputs ``name -> (algebra, a, U-basis)`` with ``a`` and ``U`` as matrices."""
    sl3_alg, pair = sl3(), sl2_sum()
    E = lambda i, j: _unit(3, i - 1, j - 1)  # noqa: E731
    lower = [E(2, 1), E(3, 1), E(3, 2)]
    a1 = np.diag([1.0, 0.0, -1.0])
    blk = np.zeros((4, 4))
    blk[1, 0] = blk[3, 2] = 1.0
    return {
        "full": (sl3_alg, a1, lower),
        "corner": (sl3_alg, a1, [E(3, 1)]),
        "column": (sl3_alg, a1, [E(2, 1), E(3, 1)]),
        "principal": (sl3_alg, np.diag([2.0, 0.0, -2.0]), [E(2, 1) + E(3, 2)]),
        "product": (pair, np.diag([1.0, -1.0, 1.0, -1.0]), [blk]),
    }


def s_tilde_case(name):
    """Run :func:`compute_s_tilde` on one of :func:`s_tilde_cases`."""
    cases = s_tilde_cases()
    if name not in cases:
        raise InvalidInput(f"unknown case {name!r}; choose from {sorted(cases)}")
    alg, a, U = cases[name]
    return compute_s_tilde(alg, a, [alg.coordinates(m) for m in U])
