"""Command-line entry point: every computation as a subcommand writing CSV.

Each output starts with a ``#config:`` comment recording the parsed flags
(seed included), followed by one header row.  Exit status is 0 on success,
2 for invalid input and 3 for numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import entropy as ent
from . import flows, lie, quadforms, shearing
from .errors import NumericalFailure, ValidationError
from .groups import real_jordan_decompose


def fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def floats(text):
    try:
        return [quadforms.parse_coefficient(t) for t in text.split(",") if t.strip()]
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def square(text):
    vals = floats(text)
    n = int(round(math.sqrt(len(vals))))
    if n * n != len(vals) or n < 2:
        raise argparse.ArgumentTypeError(f"{len(vals)} entries do not form a square matrix")
    return np.array(vals).reshape(n, n)


def positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return x


def posint(text):
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return x


class Table:
    """Collects rows; rendered once at the end (single writer)."""

    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *row):
        self.rows.append([fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) else str(v)
                          for v in row])


# ------------------------------------------------------------------ flows

def _flow_orbit(ns):
    orbit = flows.homogeneous_orbit(ns.kind, ns.g0, ns.T, ns.dt)
    t = Table(["t", "x", "y"])
    for i in range(0, len(orbit), ns.every):
        t.add(orbit.times[i], orbit.x[i], orbit.y[i])
    return t


def _flow_equidist(ns):
    funcs = {f"below_{h:g}": flows.smooth_indicator_below(h, ns.width) for h in ns.heights}
    period = None
    g0 = ns.g0
    if ns.gamma is not None:
        g0, period = flows.periodic_geodesic_basepoint(np.round(ns.gamma))
    rows, _ = flows.equidistribution_report(ns.kind, g0, funcs, ns.T, ns.dt, period=period)
    t = Table(["T", "f", "time_avg", "space_avg", "deviation"])
    for r in rows:
        t.add(r.T, r.name, r.time_avg, r.space_avg, r.deviation)
    return t


def _flow_nondiv(ns):
    orbit = flows.homogeneous_orbit("horocycle", ns.g0, ns.T, ns.dt)
    t = Table(["h", "T", "fraction_above", "cusp_measure"])
    for h in ns.heights:
        t.add(h, ns.T, flows.nondivergence_fraction(orbit, h), 3.0 / (math.pi * h) if h >= 1 else math.nan)
    return t


def _torus_closure(ns):
    c = flows.torus_orbit_closure(ns.v, bound=ns.bound, tol=ns.tol)
    inside, outside = flows.closure_occupancy(ns.v, closure=c, boxes=ns.boxes, seed=ns.seed)
    t = Table(["dimension", "relations", "occupancy_inside", "occupancy_outside", "heuristic"])
    rel = ";".join(" ".join(str(e) for e in m) for m in c.relations)
    t.add(c.dimension, rel, inside, outside, "yes")
    return t


def _torus_average(ns):
    mode = np.asarray(ns.mode, dtype=float)
    if len(mode) != len(ns.v):
        raise ValidationError("--mode must have the same length as --v")
    x0 = np.zeros(len(ns.v)) if ns.x0 is None else np.asarray(ns.x0)
    state = flows.TorusState(x0, ns.v)

    def f(pts):
        return np.cos(2 * np.pi * pts @ mode)

    space = 1.0 if not np.any(mode) else 0.0
    t = Table(["T", "time_avg", "space_avg", "deviation"])
    for T in ns.T:
        avg = flows.torus_time_average(state, f, T, ns.dt)
        t.add(T, avg, space, abs(avg - space))
    return t


# ---------------------------------------------------------------- shearing

def _shear_table(ns):
    d = shearing.unipotent_displacement(ns.q)
    t = Table(["t", "e11", "e12", "e21", "e22", "dominant"])
    for row in shearing.divergence_table(d, np.linspace(0.0, ns.tmax, ns.steps + 1)):
        t.add(*row)
    if ns.L is not None:
        ts, idx = shearing.first_divergence(d, ns.L)
        m = np.abs(d(ts))
        t.add(ts, m[0, 0], m[0, 1], m[1, 0], m[1, 1], f"{idx[0]}{idx[1]}*")
    return t


def _shear_extension(ns):
    t = Table(["degree", "delta", "eps"])
    if ns.coef is not None:
        deg = len(np.trim_zeros(np.asarray(ns.coef), "b")) - 1
        t.add(max(deg, 0), ns.delta, shearing.polynomial_extension_factor(ns.coef, ns.k, ns.length, ns.delta))
    else:
        for row in shearing.extension_table(range(1, ns.max_degree + 1), [ns.delta], ns.length):
            t.add(*row)
    return t


def _shear_joint(ns):
    j = shearing.joint_transverse_divergence(ns.r1, ns.r2)
    t = Table(["component", "p", "c0", "c1", "c2", "verdict"])
    verdict = "diagonal" if j.diagonal else "off-diagonal"
    for name, disp in (("1", j.first), ("2", j.second)):
        coef = disp.coefficients()
        for i in range(2):
            for k in range(2):
                t.add(name, f"{i + 1}{k + 1}", *coef[i, k], verdict)
    return t


# ----------------------------------------------------------------- entropy

def _system(ns):
    if ns.system == "rotation":
        return ent.rotation(ns.beta, ns.inverse)
    if ns.system == "bernoulli":
        return ent.bernoulli(ns.p, ns.inverse)
    return ent.baker(ns.inverse)


def _entropy_rate(ns):
    rate = ent.entropy_rate(_system(ns), ns.kmax)
    t = Table(["system", "k", "Ek", "Ek_over_k"])
    for row in rate.rows():
        t.add(*row)
    return t


def _entropy_partition(ns):
    t = Table(["quantity", "value"])
    if ns.table is not None:
        A, B = ent.joint_table_partitions(ns.table)
        t.add("H(A)", A.entropy())
        t.add("H(B)", B.entropy())
        t.add("H(A v B)", ent.join(A, B).entropy())
        t.add("H(B|A)", ent.conditional_entropy(B, A))
    else:
        t.add("H", ent.entropy(ns.weights))
    return t


def _entropy_stretch(ns):
    spec = ent.parse_stretch_spec(ns.spec)
    t = Table(["spec", "entropy"])
    t.add(ns.spec, ent.stretch_entropy(spec))
    return t


def _entropy_translation(ns):
    alg = lie.BUILTINS[ns.algebra]()
    t = Table(["algebra", "entropy"])
    t.add(ns.algebra, ent.translation_entropy(ns.g, alg))
    return t


# --------------------------------------------------------------- qforms

def _form(ns):
    return quadforms.parse_form(ns.form)


def _qform_search(ns):
    Q = _form(ns)
    t = Table(["r", "found", "vector", "value", "shell"])
    for r, hit in zip(ns.r, quadforms.oppenheim_scan(Q, ns.r, ns.eps, ns.N)):
        if hit is None:
            t.add(r, "none-in-box", "", "", "")
        else:
            t.add(r, "yes", " ".join(map(str, hit.vector)), hit.value, hit.shell)
    return t


def _qform_count(ns):
    t = Table(["N", "count"])
    for N in ns.N:
        t.add(N, quadforms.count_values(_form(ns), ns.a, ns.b, N))
    return t


def _qform_ratio(ns):
    table = quadforms.counting_ratio_table(_form(ns), ns.a, ns.b, ns.N, ns.samples, ns.seed)
    t = Table(["N", "count", "volume", "volume_stderr", "ratio", "ratio_stderr", "exponent", "expected_exponent"])
    for row in table.csv_rows():
        t.add(*row, table.exponent, table.expected_exponent)
    return t


def _qform_gap(ns):
    g = quadforms.gap_analysis(ns.R, ns.c)
    t = Table(["R", "running_min"])
    for R in sorted(set(np.unique(np.geomspace(1, ns.R, 40).astype(int)).tolist() + [ns.R])):
        t.add(R, g.running[R - 1])
    t.add("argmin", f"{g.argmin[0]} {g.argmin[1]}")
    return t


def _qform_signature(ns):
    Q = _form(ns)
    p, q, z = Q.signature
    t = Table(["p", "q", "z", "rational_multiple"])
    t.add(p, q, z, str(quadforms.is_rational_multiple(Q)))
    return t


# ------------------------------------------------------------ algebra

def _jordan(ns):
    triple = real_jordan_decompose(ns.matrix)
    n = ns.matrix.shape[0]
    t = Table(["factor"] + [f"m{i + 1}{j + 1}" for i in range(n) for j in range(n)])
    for name, m in zip(("unipotent", "hyperbolic", "elliptic"), triple):
        t.add(name, *m.ravel())
    return t


def _stilde(ns):
    if ns.case:
        alg = lie.s_tilde_cases()[ns.case][0]
        sub = lie.s_tilde_case(ns.case)
    else:
        alg = lie.BUILTINS[ns.algebra]()
        U = [alg.coordinates(square(m)) for m in ns.U.split(";")] if ns.U else []
        sub = lie.compute_s_tilde(alg, alg.coordinates(ns.a), U)
    t = Table(["index"] + list(alg.labels))
    for i, row in enumerate(sub.basis):
        t.add(i, *np.where(np.abs(row) < 1e-14, 0.0, row))
    return t


# ----------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="homdyn", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def group(name, help_):
        g = sub.add_parser(name, help=help_)
        return g.add_subparsers(dest="action", required=True)

    def leaf(parent, name, fn, help_):
        q = parent.add_parser(name, parents=[common], help=help_)
        q.set_defaults(fn=fn)
        return q

    identity = np.eye(2)
    fl = group("flow", "geodesic and horocycle flows on SL(2,Z)\\SL(2,R)")
    q = leaf(fl, "orbit", _flow_orbit, "reduced orbit trace")
    q.add_argument("--kind", choices=["horocycle", "geodesic"], default="horocycle")
    q.add_argument("--g0", type=square, default=identity)
    q.add_argument("--T", type=positive, default=10.0)
    q.add_argument("--dt", type=positive, default=0.01)
    q.add_argument("--every", type=posint, default=1)
    q = leaf(fl, "equidist", _flow_equidist, "time vs space averages")
    q.add_argument("--kind", choices=["horocycle", "geodesic"], default="horocycle")
    q.add_argument("--g0", type=square, default=identity)
    q.add_argument("--gamma", type=square, default=None, help="closed geodesic of this SL(2,Z) element")
    q.add_argument("--T", type=floats, default=[1e3, 1e4])
    q.add_argument("--dt", type=positive, default=0.01)
    q.add_argument("--heights", type=floats, default=[2.0, 1.5])
    q.add_argument("--width", type=positive, default=0.02)
    q = leaf(fl, "nondiv", _flow_nondiv, "fraction of time high in the cusp")
    q.add_argument("--g0", type=square, default=identity)
    q.add_argument("--T", type=positive, default=1e4)
    q.add_argument("--dt", type=positive, default=0.01)
    q.add_argument("--heights", type=floats, default=[10.0])

    to = group("torus", "linear flows on tori")
    q = leaf(to, "closure", _torus_closure, "orbit-closure dimension")
    q.add_argument("--v", type=floats, required=True)
    q.add_argument("--bound", type=posint, default=50)
    q.add_argument("--tol", type=positive, default=1e-9)
    q.add_argument("--boxes", type=posint, default=20)
    q = leaf(to, "average", _torus_average, "time average of cos(2 pi m.x)")
    q.add_argument("--v", type=floats, required=True)
    q.add_argument("--x0", type=floats, default=None)
    q.add_argument("--mode", type=floats, required=True)
    q.add_argument("--T", type=floats, default=[10.0, 100.0, 1000.0])
    q.add_argument("--dt", type=positive, default=0.01)

    sh = group("shear", "divergence of nearby unipotent orbits")
    q = leaf(sh, "table", _shear_table, "entries of u(-t) q u(t) - I")
    q.add_argument("--q", type=square, required=True)
    q.add_argument("--tmax", type=positive, default=10.0)
    q.add_argument("--steps", type=posint, default=10)
    q.add_argument("--L", type=positive, default=None, help="append the first-divergence row")
    q = leaf(sh, "extension", _shear_extension, "polynomial extension factors")
    q.add_argument("--coef", type=floats, default=None, help="coefficients, constant term first")
    q.add_argument("--k", type=float, default=0.0)
    q.add_argument("--length", type=positive, default=1.0)
    q.add_argument("--delta", type=positive, default=1.0)
    q.add_argument("--max-degree", type=posint, default=8)
    q = leaf(sh, "joint", _shear_joint, "joint divergence in SL(2) x SL(2)")
    q.add_argument("--r1", type=float, required=True)
    q.add_argument("--r2", type=float, required=True)

    en = group("entropy", "entropy of partitions and maps")
    q = leaf(en, "rate", _entropy_rate, "E^k/k for a model system")
    q.add_argument("--system", choices=["rotation", "bernoulli", "baker"], required=True)
    q.add_argument("--p", type=float, default=0.5)
    q.add_argument("--beta", type=float, default=math.sqrt(3) / 100)
    q.add_argument("--kmax", type=posint, default=20)
    q.add_argument("--inverse", action="store_true")
    q = leaf(en, "partition", _entropy_partition, "entropy of weights or a joint table")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--weights", type=floats)
    g.add_argument("--table", type=lambda s: [floats(r) for r in s.split(";")], help="rows separated by ';'")
    q = leaf(en, "stretch", _entropy_stretch, "sum of d log tau over expanding factors")
    q.add_argument("--spec", required=True, help='"tau:dim,..."; tau may be e^x')
    q = leaf(en, "translation", _entropy_translation, "log-Jacobian on the expanding subalgebra")
    q.add_argument("--algebra", choices=sorted(lie.BUILTINS), default="sl2")
    q.add_argument("--g", type=square, required=True)

    qf = group("qform", "quadratic forms")
    form_help = "upper triangle of the symmetric matrix, e.g. 1,-sqrt2/2,0,0,0,sqrt3"
    q = leaf(qf, "search", _qform_search, "integer vectors with Q(v) near r")
    q.add_argument("--form", required=True, help=form_help)
    q.add_argument("--r", type=floats, required=True)
    q.add_argument("--eps", type=positive, default=0.01)
    q.add_argument("--N", type=posint, default=200)
    q = leaf(qf, "count", _qform_count, "lattice points with a < Q < b")
    q.add_argument("--form", required=True, help=form_help)
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--N", type=floats, default=[10.0])
    q = leaf(qf, "ratio", _qform_ratio, "count against Monte Carlo volume")
    q.add_argument("--form", required=True, help=form_help)
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--N", type=floats, default=[10.0, 20.0, 40.0])
    q.add_argument("--samples", type=posint, default=200_000)
    q = leaf(qf, "gap", _qform_gap, "running minimum of |p^2 - c q^2|")
    q.add_argument("--R", type=posint, default=2000)
    q.add_argument("--c", type=quadforms.parse_coefficient, default=3 + 2 * math.sqrt(2))
    q = leaf(qf, "signature", _qform_signature, "signature (p, q, z)")
    q.add_argument("--form", required=True, help=form_help)

    q = sub.add_parser("jordan", parents=[common], help="real Jordan decomposition")
    q.set_defaults(fn=_jordan)
    q.add_argument("--matrix", type=square, required=True, help="row-major entries")
    q = sub.add_parser("stilde", parents=[common], help="S-tilde subalgebra")
    q.set_defaults(fn=_stilde)
    q.add_argument("--case", choices=sorted(lie.s_tilde_cases()), default=None)
    q.add_argument("--algebra", choices=sorted(lie.BUILTINS), default="sl3")
    q.add_argument("--a", type=square, default=None)
    q.add_argument("--U", default="", help="';'-separated row-major matrices")
    return p


def _config(ns):
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k == "fn":
            continue
        if isinstance(v, np.ndarray):
            v = v.tolist()
        out[k] = v
    return json.dumps(out, sort_keys=True, default=str)


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(ns, "fn", None) is _stilde and not ns.case and ns.a is None:
        print("stilde: give --case or --a", file=stderr)
        return 2
    try:
        table = ns.fn(ns)
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (NumericalFailure, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return 3
    buf = io.StringIO()
    buf.write("#config: " + _config(ns) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    w.writerows(table.rows)
    if ns.out == "-":
        stdout.write(buf.getvalue())
    else:
        with open(ns.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
