"""Command-line front end: ``freespec <command> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid arguments,
3 optional feature unavailable.

Rationals are written as ``"p/q"`` strings; floats use the shortest
round-trip representation.  CSV headers per command:

    moments     n,r_n,s_n
    stationary  kind,psi,value
    flow        z,psi,status
    blowup      t,a,y,z,residual
    jacobi      n,value,limit,error
    verify      module,check,passed,detail
    simulate    theta,n,mean,stderr,exact
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import convolution, flow, jacobi, moments, ncfree, stationary
from .moments import RankParam

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNAVAILABLE = 3

CSV_HEADERS = {
    "moments": ["n", "r_n", "s_n"],
    "stationary": ["kind", "psi", "value"],
    "flow": ["z", "psi", "status"],
    "blowup": ["t", "a", "y", "z", "residual"],
    "jacobi": ["n", "value", "limit", "error"],
    "verify": ["module", "check", "passed", "detail"],
    "simulate": ["theta", "n", "mean", "stderr", "exact"],
}


class UsageError(Exception):
    pass


def parse_theta(text: str) -> Fraction:
    try:
        theta = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational or decimal: {text!r}")
    if not 0 < theta <= 1:
        raise argparse.ArgumentTypeError("theta must lie in (0, 1]")
    return theta


def encode(value):
    """JSON-ready form: Fractions to ``"p/q"``, numpy scalars to Python."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def decode_fraction(text: str) -> Fraction:
    return Fraction(text)


# commands --------------------------------------------------------------


def cmd_moments(args) -> List[dict]:
    rank = RankParam(args.theta)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    records = []
    if args.n <= moments.DEFAULT_N_MAX:
        table = moments.solve_recursion(rank, args.n)
        for n in range(1, args.n + 1):
            records.append({
                "n": n,
                "r_n": moments.r_moment(table, n, args.t),
                "s_n": table.s_n(n).to_string(),
            })
    else:
        values = moments.OdeMoments(rank).moments(args.t, args.n)
        records = [{"n": n, "r_n": float(v), "s_n": None} for n, v in enumerate(values, start=1)]
    return records


def cmd_stationary(args) -> List[dict]:
    rank = RankParam(args.theta)
    measure = stationary.stationary_measure(rank)
    records = [{"kind": "atom", "psi": 0.0, "value": abs(rank.kappa)}]
    grid = np.linspace(0.0, 2 * math.pi, args.points)
    for psi, val in zip(grid, stationary.stationary_density(rank, grid)):
        records.append({"kind": "density", "psi": float(psi), "value": float(val)})
    if not measure.arcs:
        records = records[:1]
    return records


def cmd_flow(args) -> List[dict]:
    rank = RankParam(args.theta)
    zs = args.z if args.z else list(np.round(np.linspace(-0.9, 0.9, 19), 12))
    records = []
    for z in zs:
        try:
            records.append({"z": float(z), "psi": flow.psi(rank, args.t, float(z)), "status": "ok"})
        except flow.BlowupError:
            records.append({"z": float(z), "psi": None, "status": "past-blowup"})
        except ValueError as exc:
            raise UsageError(str(exc))
    return records


def cmd_blowup(args) -> List[dict]:
    rank = RankParam(args.theta)
    try:
        bp = flow.blowup_point(rank, args.t)
    except ValueError as exc:
        raise UsageError(str(exc))
    return [{"t": bp.t, "a": bp.a, "y": bp.y, "z": bp.z, "residual": bp.residual}]


def cmd_jacobi(args) -> List[dict]:
    rank = RankParam(args.theta)
    grid = args.n_grid or [10, 100, 1000, 4000]
    try:
        table = jacobi.limit_moment(rank, args.t, grid)
    except ValueError as exc:
        raise UsageError(str(exc))
    return [
        {"n": n, "value": v, "limit": table.limit, "error": e}
        for n, v, e in zip(table.n, table.values, table.errors)
    ]


def _check(records, module, name, fn: Callable[[], tuple]):
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash counts as a failure
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    records.append({"module": module, "check": name, "passed": bool(passed), "detail": str(detail)})


def verification_suite(theta: Fraction, t: float = 0.5) -> List[dict]:
    """Cross-checks of every module at one rank; each returns (passed, detail)."""
    rank = RankParam(theta)
    eps = rank.eps
    k = abs(float(rank.kappa))
    out: List[dict] = []
    table = moments.solve_recursion(rank, 12)

    _check(out, "moments", "s_n(0) = 1, n <= 12",
           lambda: (all(table.s_n(n).at_zero() == 1 for n in range(1, 13)), "exact"))
    _check(out, "moments", "transport equation coefficients",
           lambda: (moments.check_pde_coefficients(table).all_pass, "exact"))
    _check(out, "moments", "exact table vs ODE",
           lambda: (lambda d: (d < 1e-10, f"max diff {d:.2e}"))(
               float(np.abs(table.moments(t, 12) - moments.OdeMoments(rank).moments(t, 12)).max())))

    def stationary_triple():
        taylor = stationary.stationary_moments_taylor(rank, 12)
        ok = True
        for n in range(1, 13):
            a = stationary.stationary_moment_jacobi(rank, n)
            b = stationary.stationary_moment_sum(rank, n)
            c = table.stationary_part(n)
            ok &= a == b == c and abs(float(a) - taylor[n - 1]) < 1e-10
        return ok, "n <= 12"

    _check(out, "stationary", "Jacobi = Pochhammer = Taylor = recursion", stationary_triple)

    def mass_and_moments():
        m = stationary.stationary_measure(rank)
        mass = m.mass()
        dev = max(abs(m.moment(n) - float(table.stationary_part(n))) for n in range(1, 9))
        return abs(mass - 1) < 1e-8 and dev < 1e-8, f"mass-1 {mass - 1:.1e}, moments {dev:.1e}"

    _check(out, "stationary", "mass and moments by quadrature", mass_and_moments)

    _check(out, "ncfree", "Catalan counts, m <= 8",
           lambda: (all(sum(1 for _ in ncfree.enumerate_nc(m)) == ncfree.catalan(m)
                        for m in range(1, 9)), "m <= 8"))
    _check(out, "ncfree", "|p| + |K(p)| = m + 1 on NC(8)",
           lambda: (all(len(p) + len(ncfree.kreweras(p)) == 9 for p in ncfree.enumerate_nc(8)), "NC(8)"))
    _check(out, "ncfree", "P_n(eps, 0): even blocks = halved sum = recursion",
           lambda: (all(ncfree.p_n_at_zero(rank, n) == ncfree.p_n_at_zero_halved(rank, n)
                        == table.decay_part(n)(Fraction(0)) for n in range(1, 5)), "n <= 4"))

    def comb_vs_table():
        d = max(abs(ncfree.r_n_combinatorial(rank, n, t) - table.r(n, t)) for n in range(1, 5))
        return d < 1e-10, f"max diff {d:.2e}"

    _check(out, "ncfree", "cumulant sum vs recursion, n <= 4", comb_vs_table)

    def flow_identity():
        worst = 0.0
        for z in (-0.5, -0.2, 0.2):
            worst = max(worst, flow.conserved_identity_residual(rank, 0.1, z, 80))
        return worst < 1e-6, f"max residual {worst:.1e}"

    if k < 1:
        _check(out, "flow", "conserved identity along characteristics", flow_identity)
        _check(out, "flow", "blow-up point residual",
               lambda: (lambda bp: (bp.residual < 1e-12, f"{bp.residual:.1e}"))(flow.blowup_point(rank, t)))
    if 0 < k < 1:
        _check(out, "flow", "radial limit 4 kappa^2",
               lambda: (lambda al: (abs(al.limit - 4 * float(eps)) < 1e-6, f"{al.limit:.10f}"))(
                   flow.atom_limit(rank, t)))

    def k_of_g():
        zs = np.geomspace(10, 1000, 20)
        d = max(abs(convolution.k_transform(rank, convolution.cauchy_via_cubic(rank, z)) - z) for z in zs)
        return d < 1e-10, f"max |K(G(z)) - z| {d:.1e}"

    _check(out, "convolution", "K(G(z)) = z", k_of_g)
    _check(out, "convolution", "half-convolution moments = P_n(eps, 0)",
           lambda: (all(convolution.half_convolution_moments(rank, 8)[2 * n - 1] == ncfree.p_n_at_zero(rank, n)
                        for n in range(1, 5)), "n <= 4"))
    if k < 1:
        def laurent():
            lm = convolution.laurent_moments(rank, 8)
            ref = [float(v) for v in convolution.half_convolution_moments(rank, 8)]
            d = float(np.abs(lm - ref).max())
            return d < 1e-8, f"max diff {d:.1e}"

        _check(out, "convolution", "Laurent moments of G", laurent)

    _check(out, "jacobi", "moment at t = 0 equals theta",
           lambda: (all(jacobi.jacobi_moment(rank, 0.0, n, stationary_ones(n)) == theta
                        for n in range(1, 9)), "n <= 8"))
    _check(out, "jacobi", "cosine kernel identity",
           lambda: (lambda d: (d < 1e-12, f"{d:.1e}"))(
               max(abs(a - b) for n in range(1, 21) for p in np.linspace(0, 2 * math.pi, 25)
                   for a, b in [jacobi.cosine_kernel_identity(n, p)])))

    def stationary_jacobi():
        st = stationary.StationaryMoments(rank)
        ref = jacobi.stationary_jacobi_moments(rank, 8)
        return all(jacobi.jacobi_moment(rank, 0.0, n, st) / theta == ref[n - 1] for n in range(1, 9)), "n <= 8"

    _check(out, "jacobi", "stationary limit vs generating function", stationary_jacobi)
    _check(out, "jacobi", "corollary weight",
           lambda: (jacobi.corollary_weight(rank) == max(2 * theta - 1, Fraction(0)) / theta, "exact"))
    return out


class stationary_ones:
    """Moment provider with ``r_k = 1`` (time zero)."""

    def __init__(self, n_max: int):
        self.n_max = n_max

    def moments(self, t, n):
        return [Fraction(1)] * n


def cmd_verify(args) -> List[dict]:
    return verification_suite(args.theta, args.t)


def cmd_simulate(args) -> List[dict]:
    try:
        from . import matrix
    except ImportError as exc:  # pragma: no cover - numpy/scipy are hard requirements
        raise FeatureUnavailable(str(exc))
    cfg = matrix.SimConfig(N=args.N, theta=float(args.theta), dt=args.dt, t_end=args.t,
                           trials=args.trials, seed=args.seed)
    res = matrix.simulate_moments(cfg, list(range(1, args.n + 1)))
    table = moments.solve_recursion(RankParam(args.theta), min(args.n, moments.DEFAULT_N_MAX))
    return [
        {"theta": args.theta, "n": n, "mean": float(m), "stderr": float(s),
         "exact": table.r(n, args.t) if n <= table.n_max else None}
        for n, m, s in zip(res.n, res.mean, res.stderr)
    ]


class FeatureUnavailable(Exception):
    pass


COMMANDS = {
    "moments": cmd_moments,
    "stationary": cmd_stationary,
    "flow": cmd_flow,
    "blowup": cmd_blowup,
    "jacobi": cmd_jacobi,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freespec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, t_default=1.0):
        p.add_argument("--theta", type=parse_theta, required=True, help="rank, p/q or decimal")
        p.add_argument("--t", type=float, default=t_default, help="time")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--output", help="write here instead of stdout")

    p = sub.add_parser("moments", help="r_n(t) and the exact s_n(t)")
    common(p)
    p.add_argument("--n", type=int, default=6)

    p = sub.add_parser("stationary", help="stationary density samples and atom")
    common(p)
    p.add_argument("--points", type=int, default=65)

    p = sub.add_parser("flow", help="psi(t, z) along real starting points")
    common(p)
    p.add_argument("--z", type=float, nargs="*")

    p = sub.add_parser("blowup", help="starting point blowing up at time t")
    common(p)

    p = sub.add_parser("jacobi", help="free Jacobi moments along an n-grid")
    common(p)
    p.add_argument("--n-grid", type=int, nargs="*", dest="n_grid")

    p = sub.add_parser("verify", help="cross-check every module")
    common(p, t_default=0.5)

    p = sub.add_parser("simulate", help="random matrix estimates of r_n(t)")
    common(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=20240601)
    return parser


def render(command: str, records: List[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(encode(records), indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADERS[command], lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: ("" if v is None else (encode(v) if isinstance(v, Fraction) else repr(v)
                                                  if isinstance(v, float) else v))
                         for k, v in rec.items()})
    return buf.getvalue()


def print_matrix(records: Sequence[dict], stream) -> None:
    width = max(len(r["check"]) for r in records)
    for r in records:
        mark = "PASS" if r["passed"] else "FAIL"
        stream.write(f"{mark}  {r['module']:<12} {r['check']:<{width}}  {r['detail']}\n")


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    started = time.perf_counter()
    try:
        records = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"freespec: error: {exc}\n")
        return EXIT_USAGE
    except FeatureUnavailable as exc:
        sys.stderr.write(f"freespec: feature unavailable: {exc}\n")
        return EXIT_UNAVAILABLE
    text = render(args.command, records, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify":
        print_matrix(records, sys.stderr)
        sys.stderr.write(f"{len(records)} checks in {time.perf_counter() - started:.1f} s\n")
        return EXIT_FAIL if not all(r["passed"] for r in records) else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
