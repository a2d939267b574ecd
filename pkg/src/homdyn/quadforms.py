"""Quadratic forms: signature, SO(Q) membership, integer-value search,
lattice counting against Monte Carlo volume, and the two-variable gap.

``Q(v) = v B v^T`` for row vectors ``v``.
"""

import csv
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import BudgetExceeded, InvalidInput
from .tolerances import SIGNATURE_ZERO

COUNT_BUDGET = 10 ** 9
SQRT_GAP_ALPHA = 1.0 + math.sqrt(2.0)


class QuadraticForm:
    """Symmetric bilinear data of a real quadratic form."""

    def __init__(self, B):
        B = np.asarray(B, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
            raise InvalidInput("form matrix must be square")
        if not np.all(np.isfinite(B)):
            raise InvalidInput("form matrix has non-finite entries")
        self.B = 0.5 * (B + B.T)
        self.n = B.shape[0]
        self._signature = None

    @classmethod
    def from_upper(cls, coeffs, n=None):
        """Build from the row-major upper triangle of the symmetric matrix."""
        coeffs = [float(c) for c in coeffs]
        if n is None:
            n = int(round((math.sqrt(8 * len(coeffs) + 1) - 1) / 2))
        if n * (n + 1) // 2 != len(coeffs):
            raise InvalidInput(f"{len(coeffs)} coefficients do not fill an upper triangle")
        B = np.zeros((n, n))
        B[np.triu_indices(n)] = coeffs
        return cls(B + np.triu(B, 1).T)

    @classmethod
    def diagonal(cls, diag):
        return cls(np.diag(np.asarray(diag, dtype=float)))

    def __call__(self, v):
        return evaluate(self, v)

    def __repr__(self):
        return f"QuadraticForm({self.B.tolist()!r})"

    def bilinear(self, v, w):
        return float(np.asarray(v, float) @ self.B @ np.asarray(w, float))

    def polynomial_coefficients(self):
        """Coefficients of ``x_i^2`` (diagonal) and ``x_i x_j`` (``2 B_ij``, ``i < j``)."""
        iu = np.triu_indices(self.n, 1)
        return np.concatenate([np.diag(self.B), 2 * self.B[iu]])

    @property
    def signature(self):
        if self._signature is None:
            self._signature = signature(self)
        return self._signature

    def is_indefinite(self):
        p, q, _ = self.signature
        return p >= 1 and q >= 1

    def is_nondegenerate(self):
        return self.signature[2] == 0


def evaluate(Q, v):
    """``v B v^T``; accepts one vector or a stack of row vectors."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != Q.n:
        raise InvalidInput(f"vector length {v.shape[-1]} does not match dimension {Q.n}")
    if v.ndim == 1:
        return float(v @ Q.B @ v)
    return np.einsum("...i,ij,...j->...", v, Q.B, v)


def signature(Q):
    """``(p, q, z)``: counts of positive, negative and (near-)zero eigenvalues."""
    eig = np.linalg.eigvalsh(Q.B)
    zero = SIGNATURE_ZERO * max(np.abs(Q.B).max(), np.finfo(float).tiny)
    return int((eig > zero).sum()), int((eig < -zero).sum()), int((np.abs(eig) <= zero).sum())


@dataclass(frozen=True)
class RationalVerdict:
    """``k`` is set when some ``k Q`` has integer coefficients; the search is bounded."""

    k: object
    height: int
    heuristic: bool = True

    @property
    def rational(self):
        return self.k is not None

    def __str__(self):
        return f"yes({self.k})" if self.rational else "no-within-bounds"


def is_rational_multiple(Q, height=10 ** 4, tol=1e-8):
    """Search the smallest ``k > 0`` with ``k Q`` integral, ``k = p/q``, ``|p|, |q| <= height``.

    Integrality refers to the polynomial coefficients (``B_ii`` and
    ``2 B_ij``).  Candidates are ``k = n / c`` for the largest coefficient
    ``c`` and ``n = 1, 2, ...``.
    """
    if height < 1:
        raise InvalidInput("height must be >= 1")
    c = Q.polynomial_coefficients()
    if np.abs(c).max() == 0:
        return RationalVerdict(Fraction(1), height)
    pivot = c[np.argmax(np.abs(c))]
    nmax = int(height * abs(pivot)) + 1
    for start in range(1, nmax + 1, 65536):
        n = np.arange(start, min(start + 65536, nmax + 1), dtype=float)
        k = n / abs(pivot)
        scaled = np.outer(k, c)
        ok = np.all(np.abs(scaled - np.round(scaled)) <= tol, axis=1)
        for kk in k[ok]:
            frac = Fraction(float(kk)).limit_denominator(height)
            if abs(float(frac) - kk) <= tol and abs(frac.numerator) <= height:
                return RationalVerdict(frac, height)
    return RationalVerdict(None, height)


def so_q_member(Q, h, tol=1e-9):
    """True iff ``h B h^T = B`` within ``tol`` (so ``Q(v h) = Q(v)``)."""
    h = np.asarray(h, dtype=float)
    if h.shape != Q.B.shape:
        raise InvalidInput("dimension mismatch")
    if abs(np.linalg.det(h) - 1.0) > tol * max(1.0, np.abs(h).max() ** Q.n):
        raise InvalidInput("h must have determinant 1")
    scale = max(1.0, np.abs(Q.B).max() * np.abs(h).max() ** 2)
    return bool(np.abs(h @ Q.B @ h.T - Q.B).max() <= tol * scale)


# integer vectors ------------------------------------------------------------

def _box(n, s):
    """All vectors of ``[-s, s]^n``, descending lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axis = np.arange(s, -s - 1, -1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def sup_shell(n, s):
    """Integer vectors with ``max |v_i| = s``, descending lexicographic order."""
    if s == 0:
        return np.zeros((1, n), dtype=np.int64)
    if n == 1:
        return np.array([[s], [-s]], dtype=np.int64)
    face = _box(n - 1, s)
    ring = sup_shell(n - 1, s)
    mids = np.arange(s - 1, -s, -1, dtype=np.int64)
    middle = np.column_stack([np.repeat(mids, len(ring)), np.tile(ring, (len(mids), 1))])

    def cap(x0):
        return np.column_stack([np.full(len(face), x0, dtype=np.int64), face])

    return np.vstack([cap(s), middle, cap(-s)])


@dataclass(frozen=True)
class SearchHit:
    vector: tuple
    value: float
    shell: int


def oppenheim_scan(Q, targets, eps, N):
    """``oppenheim_search`` for several targets in one pass over the shells.

    Returns a list aligned with ``targets`` of ``SearchHit`` or ``None``.
    """
    if not eps > 0 or N < 1:
        raise InvalidInput("need eps > 0 and N >= 1")
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    hits = [None] * len(targets)
    open_ = list(range(len(targets)))
    for s in range(1, int(N) + 1):
        if not open_:
            break
        shell = sup_shell(Q.n, s)
        vals = evaluate(Q, shell.astype(float))
        for i in list(open_):
            idx = np.flatnonzero(np.abs(vals - targets[i]) < eps)
            if idx.size:
                j = idx[0]
                hits[i] = SearchHit(tuple(int(x) for x in shell[j]), float(vals[j]), s)
                open_.remove(i)
    return hits


def oppenheim_search(Q, r, eps, N):
    """First nonzero ``v`` with ``|Q(v) - r| < eps`` and ``max |v_i| <= N``.

    Shells ``max |v_i| = 1, 2, ...`` are scanned in turn, each in descending
    lexicographic order.  Returns ``None`` when the box has no hit.
    """
    return oppenheim_scan(Q, [r], eps, N)[0]


def closest_value(Q, r, N):
    """``(distance, v)`` for the integer vector in ``0 < max |v_i| <= N`` with ``Q(v)`` nearest ``r``."""
    best = (math.inf, None)
    for s in range(1, int(N) + 1):
        shell = sup_shell(Q.n, s)
        d = np.abs(evaluate(Q, shell.astype(float)) - r)
        j = int(np.argmin(d))
        if d[j] < best[0]:
            best = (float(d[j]), tuple(int(x) for x in shell[j]))
    return best


def _ball_slices(n, N):
    """Yield integer points of the Euclidean ball of radius ``N``, first coordinate at a time."""
    N = float(N)
    R = int(math.floor(N))
    inner = _box(n - 1, R) if n > 1 else np.zeros((1, 0), dtype=np.int64)
    inner_sq = (inner.astype(float) ** 2).sum(axis=1)
    for x0 in range(-R, R + 1):
        keep = inner_sq + x0 * x0 <= N * N + 1e-9
        rest = inner[keep]
        yield np.column_stack([np.full(len(rest), x0, dtype=np.int64), rest])


def count_values(Q, a, b, N):
    """Number of ``v`` in ``Z^n`` with ``||v||_2 <= N`` and ``a < Q(v) < b`` (origin included)."""
    if not a < b:
        raise InvalidInput("need a < b")
    if N < 1:
        raise InvalidInput("need N >= 1")
    if Q.n * float(N) ** Q.n > COUNT_BUDGET:
        raise BudgetExceeded(f"dimension * N^n = {Q.n * float(N) ** Q.n:.3g} exceeds {COUNT_BUDGET:.0e}")
    total = 0
    for pts in _ball_slices(Q.n, N):
        vals = evaluate(Q, pts.astype(float))
        total += int(np.count_nonzero((vals > a) & (vals < b)))
    return total


def ball_volume(d, radius=1.0):
    return math.pi ** (d / 2) / gamma_fn(d / 2 + 1) * radius ** d


def _fibre_length(Q, w, a, b, T):
    """Measure of ``{t in [-T, T] : a < Q(w, t) < b}`` for each row of ``w``.

    ``Q(w, t) = c2 t^2 + c1 t + c0``; the breakpoints are the real roots
    of ``Q = a`` and ``Q = b`` inside ``[-T, T]``.
    """
    B = Q.B
    c2 = B[-1, -1]
    c1 = 2.0 * w @ B[:-1, -1]
    c0 = np.einsum("si,ij,sj->s", w, B[:-1, :-1], w)
    pts = [-T, T]
    for level in (a, b):
        if abs(c2) > 0:
            disc = c1 * c1 - 4 * c2 * (c0 - level)
            sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
            pts += [(-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)]
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                pts.append((level - c0) / c1)
    P = np.column_stack(pts)
    P = np.where(np.isfinite(P), P, -T[:, None])
    P = np.clip(P, -T[:, None], T[:, None])
    P.sort(axis=1)
    mids = 0.5 * (P[:, 1:] + P[:, :-1])
    q = c2 * mids ** 2 + c1[:, None] * mids + c0[:, None]
    inside = (q > a) & (q < b)
    return (np.diff(P, axis=1) * inside).sum(axis=1)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float


def region_volume(Q, a, b, N, samples=200_000, strata=20, seed=0):
    """Monte Carlo volume of ``{||v|| <= N, a < Q(v) < b}``.

    The first ``n - 1`` coordinates are sampled in the ``(n-1)``-ball,
    stratified into equal-volume radial shells (each with its own child
    seed); the last coordinate is integrated exactly.
    """
    if Q.n < 2:
        raise InvalidInput("volume estimate needs n >= 2")
    d = Q.n - 1
    per = max(2, samples // strata)
    children = np.random.SeedSequence(seed).spawn(strata)
    shell_vol = ball_volume(d, N) / strata
    est, var = 0.0, 0.0
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        lo, hi = k / strata, (k + 1) / strata
        rad = N * (lo + (hi - lo) * rng.random(per)) ** (1.0 / d)
        direction = rng.standard_normal((per, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        w = direction * rad[:, None]
        T = np.sqrt(np.maximum(N * N - rad * rad, 0.0))
        L = _fibre_length(Q, w, a, b, T)
        est += shell_vol * L.mean()
        var += shell_vol ** 2 * L.var(ddof=1) / per
    return VolumeEstimate(est, math.sqrt(var))


@dataclass(frozen=True)
class RatioRow:
    N: float
    count: int
    volume: float
    stderr: float

    @property
    def ratio(self):
        if self.count == 0 or self.volume <= 0:
            return math.nan
        return self.count / self.volume

    @property
    def ratio_stderr(self):
        r = self.ratio
        return r * self.stderr / self.volume if math.isfinite(r) else math.nan

    @property
    def defined(self):
        return math.isfinite(self.ratio)


@dataclass(frozen=True)
class RatioTable:
    rows: list
    exponent: float
    expected_exponent: int

    def csv_rows(self):
        return [(r.N, r.count, r.volume, r.stderr, r.ratio, r.ratio_stderr) for r in self.rows]


def fitted_exponent(Ns, counts):
    """Least-squares slope of ``log count`` against ``log N`` (nan if any count is 0)."""
    Ns, counts = np.asarray(Ns, float), np.asarray(counts, float)
    if len(Ns) < 2 or np.any(counts <= 0):
        return math.nan
    return float(np.polyfit(np.log(Ns), np.log(counts), 1)[0])


def counting_ratio_table(Q, a, b, Ns, samples=200_000, seed=0, strata=20, check=True):
    """Lattice count against Monte Carlo volume for each ``N``.

    With ``check`` set the form must have ``p >= 3``, ``q >= 1`` and not be
    a (bounded-height) multiple of an integral form.
    """
    p, q, z = Q.signature
    if check:
        if p < 3 or q < 1 or z:
            raise InvalidInput(f"signature ({p},{q},{z}) does not satisfy p >= 3, q >= 1")
        if is_rational_multiple(Q).rational:
            raise InvalidInput("form is a multiple of an integral form")
    rows = []
    for N in Ns:
        c = count_values(Q, a, b, N)
        vol = region_volume(Q, a, b, N, samples, strata, seed)
        rows.append(RatioRow(N, c, vol.value, vol.stderr))
    return RatioTable(rows, fitted_exponent(Ns, [r.count for r in rows]), p + q - 2)


@dataclass(frozen=True)
class GapResult:
    minimum: float
    argmin: tuple
    running: np.ndarray  # running[R-1] = min over 0 < max(|p|,|q|) <= R


def gap_analysis(R, c=3.0 + 2.0 * math.sqrt(2.0)):
    """Minimum of ``|p^2 - c q^2|`` over ``0 < max(|p|, |q|) <= R``.

    On the shell ``max(|p|, |q|) = s`` the minimum is attained either at
    ``|q| = s`` (then ``p = s`` since ``sqrt(c) > 1``) or at ``|p| = s`` with
    ``|q|`` one of the two integers around ``s / sqrt(c)`` (the values are
    unimodal in each variable).  Values use the factorization
    ``(p - alpha q)(p + alpha q)``.
    """
    if R < 1:
        raise InvalidInput("R must be >= 1")
    if not c > 1:
        raise InvalidInput("c must exceed 1")
    alpha = math.sqrt(c)
    s = np.arange(1, int(R) + 1, dtype=float)

    def val(p, q):
        return np.abs((p - alpha * q) * (p + alpha * q))

    cand = [(s, s), (s, np.zeros_like(s))]
    fl = np.floor(s / alpha)
    cand += [(s, fl), (s, np.minimum(fl + 1, s - 1))]
    vals = np.column_stack([val(p, q) for p, q in cand])
    which = np.argmin(vals, axis=1)
    shell_min = vals[np.arange(len(s)), which]
    running = np.minimum.accumulate(shell_min)
    best = int(np.argmin(shell_min))
    p_best, q_best = cand[which[best]][0][best], cand[which[best]][1][best]
    return GapResult(float(running[-1]), (int(p_best), int(q_best)), running)


# parsing / output -------------------------------------------------------------

_TOKEN = re.compile(r"^(sqrt(\d+)|\d+(\.\d*)?([eE][-+]?\d+)?|\.\d+([eE][-+]?\d+)?)$")


def parse_coefficient(text):
    """A number, ``sqrtN``, or a ``*``/``/`` product of those, with optional sign."""
    t = text.strip().replace(" ", "")
    sign = 1.0
    while t[:1] in "+-" and t:
        if t[0] == "-":
            sign = -sign
        t = t[1:]
    if not t:
        raise InvalidInput(f"empty coefficient in {text!r}")
    value, op = 1.0, "*"
    for piece in re.split(r"([*/])", t):
        if piece in "*/" and piece:
            op = piece
            continue
        m = _TOKEN.match(piece)
        if not m:
            raise InvalidInput(f"bad coefficient token {piece!r}")
        x = math.sqrt(float(m.group(2))) if m.group(2) else float(piece)
        value = value * x if op == "*" else value / x
    return sign * value


def parse_form(text):
    """Comma-separated upper triangle, e.g. ``"1,-sqrt2/2,0,0,0,sqrt3"``."""
    return QuadraticForm.from_upper([parse_coefficient(c) for c in text.split(",")])


def write_ratio_table(fh, table):
    w = csv.writer(fh)
    w.writerow(["N", "count", "volume", "volume_stderr", "ratio", "ratio_stderr"])
    for N, c, v, se, r, rse in table.csv_rows():
        w.writerow([f"{N:.12g}", c] + [f"{x:.12g}" for x in (v, se, r, rse)])
