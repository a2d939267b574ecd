"""Matrix group elements: one-parameter subgroups, trace classification,
real Jordan decomposition, and log/exp on unipotent elements.

Matrices act on row vectors throughout, so ``u(t)`` is lower triangular.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInput, NumericalFailure
from .tolerances import DET_TOL, EIG_CLUSTER, NILPOTENT_TOL, TAU_CLS


def u(t):
    """Unipotent one-parameter subgroup ``[[1, 0], [t, 1]]``."""
    return np.array([[1.0, 0.0], [t, 1.0]])


def a(t):
    """Diagonal one-parameter subgroup ``diag(e^t, e^-t)``."""
    return np.array([[np.exp(t), 0.0], [0.0, np.exp(-t)]])


def v(r):
    """Opposite unipotent subgroup ``[[1, r], [0, 1]]``."""
    return np.array([[1.0, r], [0.0, 1.0]])


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def as_matrix(g, square=True):
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or (square and g.shape[0] != g.shape[1]) or g.shape[0] < 2:
        raise InvalidInput(f"expected a square matrix of size >= 2, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise InvalidInput("matrix has non-finite entries")
    return g


def check_unimodular(g, tol=DET_TOL):
    """Return ``g`` as a float array, raising if ``|det g - 1| > tol``."""
    g = as_matrix(g)
    det = np.linalg.det(g)
    if abs(det - 1.0) > tol * max(1.0, np.abs(g).max() ** g.shape[0]):
        raise InvalidInput(f"determinant {float(det):.17g} is not 1")
    return g


class SL2Class(str, Enum):
    IDENTITY_LIKE = "identity-like"
    UNIPOTENT = "unipotent"
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    NONE = "none-of-these"


def classify_sl2(g, tau=TAU_CLS):
    """Classify an element of SL(2,R) by its trace.

    ``+-I`` are reported as identity-like.  Otherwise trace within ``tau``
    of 2 is unipotent, above ``2 + tau`` hyperbolic, and strictly inside
    ``(-2 + tau, 2 - tau)`` elliptic.  Everything at or below ``-2 + tau``
    (negatives of unipotent or hyperbolic elements) is none-of-these.
    """
    g = check_unimodular(g)
    if g.shape != (2, 2):
        raise InvalidInput("classify_sl2 needs a 2x2 matrix")
    eye = np.eye(2)
    if np.abs(g - eye).max() <= tau or np.abs(g + eye).max() <= tau:
        return SL2Class.IDENTITY_LIKE
    tr = np.trace(g)
    if abs(tr - 2.0) <= tau:
        return SL2Class.UNIPOTENT
    if tr > 2.0 + tau:
        return SL2Class.HYPERBOLIC
    if abs(tr) < 2.0 - tau:
        return SL2Class.ELLIPTIC
    return SL2Class.NONE


@dataclass(frozen=True)
class JordanTriple:
    """Commuting factors with ``g = unip @ hyp @ ell``."""

    unip: np.ndarray
    hyp: np.ndarray
    ell: np.ndarray

    def product(self):
        return self.unip @ self.hyp @ self.ell

    def __iter__(self):
        return iter((self.unip, self.hyp, self.ell))


def _cluster(eigvals, rel_tol):
    """Group (complex) eigenvalues lying within ``rel_tol`` of each other."""
    order = np.argsort(-np.abs(eigvals), kind="stable")
    clusters = []
    for idx in order:
        lam = eigvals[idx]
        for cl in clusters:
            center = np.mean(eigvals[cl])
            if abs(lam - center) <= rel_tol * max(1.0, abs(center)):
                cl.append(idx)
                break
        else:
            clusters.append([idx])
    return [(np.mean(eigvals[cl]), len(cl)) for cl in clusters]


def real_jordan_decompose(g, cluster_tol=EIG_CLUSTER):
    """Split an invertible real matrix into unipotent, hyperbolic and
    elliptic parts that commute pairwise.

    The generalized eigenspace of each eigenvalue cluster ``lam`` is the
    null space of ``(g - lam)^m``.  On it the semisimple part acts as
    ``lam``, the hyperbolic part as ``|lam|`` and the elliptic part as
    ``lam/|lam|``; the unipotent part is what is left over.
    """
    g = as_matrix(g)
    n = g.shape[0]
    if abs(np.linalg.det(g)) < 1e-300:
        raise InvalidInput("matrix is singular")
    eigvals = np.linalg.eigvals(g)
    blocks, values = [], []
    for lam, mult in _cluster(eigvals, cluster_tol):
        m = np.linalg.matrix_power(g.astype(complex) - lam * np.eye(n), mult)
        _, s, vh = np.linalg.svd(m)
        blocks.append(vh[n - mult:].conj().T)
        values.append(np.full(mult, lam))
    basis = np.hstack(blocks)
    lam = np.concatenate(values)
    cond = np.linalg.cond(basis)
    if not np.isfinite(cond) or cond > 1e10:
        raise NumericalFailure("generalized eigenbasis is ill-conditioned", condition=cond)
    inv = np.linalg.inv(basis)

    def _spectral(diag):
        return np.real((basis * diag) @ inv)

    hyp = _spectral(np.abs(lam))
    ell = _spectral(lam / np.abs(lam))
    semisimple = _spectral(lam)
    unip = g @ np.linalg.inv(semisimple)
    return JordanTriple(unip, hyp, ell)


def _nilpotent_series(x, coeff):
    n = x.shape[0]
    out = np.zeros_like(x)
    term = np.eye(n)
    for k in range(1, n):
        term = term @ x
        out = out + coeff(k) * term
    return out


def _check_nilpotent(x, tol):
    n = x.shape[0]
    power = np.linalg.matrix_power(x, n)
    if np.abs(power).max() > tol * max(1.0, np.abs(x).max() ** n):
        raise InvalidInput("matrix is not nilpotent")


def nilpotent_log(g, tol=NILPOTENT_TOL):
    """Logarithm of a unipotent matrix; the series terminates after ``n-1`` terms."""
    g = as_matrix(g)
    x = g - np.eye(g.shape[0])
    _check_nilpotent(x, tol)
    return _nilpotent_series(x, lambda k: (-1) ** (k + 1) / k)


def unipotent_exp(x, tol=NILPOTENT_TOL):
    """Exponential of a nilpotent matrix (finite sum)."""
    x = as_matrix(x)
    _check_nilpotent(x, tol)
    fact = [1.0]
    for k in range(1, x.shape[0]):
        fact.append(fact[-1] * k)
    return np.eye(x.shape[0]) + _nilpotent_series(x, lambda k: 1.0 / fact[k])
