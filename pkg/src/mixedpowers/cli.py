"""Command-line front end.

Single results are printed as JSON, sweeps are written as CSV. Exit codes:
0 ok, 2 invalid input, 3 domain error, 4 coalescing saddles, 5 tolerance
violation (1 is reserved for internal failures).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction

import mpmath
import numpy as np

from . import saddle_engine as se
from .critical_locus import solve_critical
from .errors import CoalescenceError, ConstraintViolation, MixedPowersError, ToleranceViolation
from .function_system import Direction, ExponentVector, FunctionSystem, direction_of, exact_coefficient, reduce_vanishing
from .phase_term import check_phase_properties, taylor_F
from .precision import get_precision, mp_str, set_precision

EXIT_OK = 0
EXIT_VALIDATION = 2


def _emit(obj, out=None):
    out = out or sys.stdout
    json.dump(obj, out, indent=2)
    out.write("\n")


def _load_system(path):
    # validation is deferred so --reduce can repair factors vanishing at 0
    return FunctionSystem.load(path, check=False)


def _prepare_target(system, n, reduce):
    """Apply the vanishing-order reduction when asked, else validate."""
    if not reduce:
        FunctionSystem(system.factors, system.amplitude, system.norm, check=True)
        return system, n, None
    red = reduce_vanishing(system, n)
    FunctionSystem(red.system.factors, red.system.amplitude, red.system.norm, check=True)
    return red.system, red.n, red


def _vector(text):
    try:
        return ExponentVector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad exponent vector {text!r}: {exc}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_oracle(args):
    system = _load_system(args.system)
    if not args.reduce:
        system, _, _ = _prepare_target(system, args.n, False)
    value = exact_coefficient(system, args.n, reduce=args.reduce)
    out = {"n": list(args.n.n), "reduced": bool(args.reduce)}
    out.update(value.to_json())
    _emit(out)
    return EXIT_OK


def _direction_arg(system, args):
    if args.direction:
        parts = args.direction.replace(",", " ").split()
        vals = tuple(Fraction(p) for p in parts)
        if len(vals) != system.m + 1:
            raise ValueError("direction length must be m+1")
        return Direction.normalized(vals, system.norm)
    if args.n is None:
        raise ValueError("give an exponent vector or --direction")
    return direction_of(args.n, system.norm)


def cmd_critical(args):
    system = _load_system(args.system)
    system, _, _ = _prepare_target(system, args.n, False)
    d = _direction_arg(system, args)
    cp = solve_critical(system, d)
    out = {"direction": d.to_json(), "critical_point": cp.to_json()}
    if args.n is not None and not args.direction:
        out["nz_product"] = repr(float(args.n.size(system.norm)) * cp.z)
    _emit(out)
    return EXIT_OK


def cmd_phase(args):
    system = _load_system(args.system)
    system, _, _ = _prepare_target(system, args.n, False)
    d = _direction_arg(system, args)
    cp = solve_critical(system, d)
    exp = taylor_F(system, d, args.order, cp)
    out = exp.to_json()
    code = EXIT_OK
    if args.check:
        grid = np.linspace(-math.pi, math.pi, args.grid)
        report = check_phase_properties(system, d, grid, cp)
        out["checks"] = report.to_json()
        if not report.all_pass:
            code = ToleranceViolation.exit_code
    _emit(out)
    return code


def cmd_estimate(args):
    system = _load_system(args.system)
    system, n, red = _prepare_target(system, args.n, args.reduce)
    if red is not None and red.is_zero:
        _emit({"sign": 0, "log_abs": None, "regime": None, "method": "exact-zero", "diagnostics": {}})
        return EXIT_OK
    est = se.estimate(system, n, args.method, args.epsilon)
    _emit(est.to_json())
    return EXIT_OK


# -- sweeps -----------------------------------------------------------------


def _sweep_instances(spec):
    if "instances" in spec:
        return [tuple(int(x) for x in v) for v in spec["instances"]]
    if "family" in spec:
        fam = spec["family"]
        base = [int(x) for x in fam["base"]]
        return [tuple(m * b for b in base) for m in fam["multipliers"]]
    raise ValueError("sweep spec needs 'instances' or 'family'")


CSV_FIELDS = ["n", "size", "exact", "estimate", "estimate_log_abs", "rel_error", "regime", "method",
              "nz_product", "c2"]


def _run_instance(task):
    system_json, n, method, epsilon, reduce, bits = task
    set_precision(bits)
    system = FunctionSystem.from_json(system_json, check=False)
    n = ExponentVector(n)
    row = dict.fromkeys(CSV_FIELDS, "")
    row.update(n=" ".join(str(x) for x in n.n), size=str(n.size(system.norm)))
    try:
        exact = exact_coefficient(system, n, reduce=reduce)
        row["exact"] = str(exact.value)
        sys_r, n_r, red = _prepare_target(system, n, reduce)
        if red is not None and red.is_zero:
            row.update(estimate="0", rel_error=repr(0.0), method="exact-zero")
            return row, None
        est = se.estimate(sys_r, n_r, method, epsilon)
    except MixedPowersError as exc:
        row["method"] = f"error:{type(exc).__name__}"
        return row, (type(exc).__name__, str(exc), exc.exit_code)
    rel = est.rel_error(exact)
    diag = est.diagnostics
    c2 = diag.get("c2")
    row.update(
        estimate=mpmath.nstr(est.value, 17) if est.sign else "0",
        estimate_log_abs=mp_str(est.log_abs) if est.sign else "",
        rel_error=repr(rel),
        regime=est.regime,
        method=est.method,
        nz_product=repr(float(diag.get("nz_product", float("nan")))),
        c2="" if c2 is None else repr(float(c2)),
    )
    return row, None


def _violations(rows, tolerance):
    """Index of the first row breaking ``tolerance`` (a number or "monotone-decreasing")."""
    errs = [float(r["rel_error"]) for r in rows]
    if tolerance in ("monotone", "monotone-decreasing"):
        for i in range(1, len(errs)):
            if not errs[i] < errs[i - 1]:
                return i
        return None
    tol = float(tolerance)
    for i, e in enumerate(errs):
        if not e <= tol:
            return i
    return None


def cmd_verify(args):
    system = _load_system(args.system)
    with open(args.sweep) as fh:
        spec = json.load(fh)
    method = spec.get("method", "auto")
    if method not in se.METHODS:
        raise ValueError(f"unknown method {method!r}")
    reduce = bool(spec.get("reduce", False))
    instances = _sweep_instances(spec)
    if not instances:
        raise ValueError("sweep spec lists no instances")
    bits = get_precision()
    system_json = system.to_json()
    tasks = [(system_json, n, method, spec.get("epsilon"), reduce, bits) for n in instances]
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_instance, tasks))
    else:
        results = [_run_instance(t) for t in tasks]
    # rows in order of ||n||, ties kept in input order
    order = sorted(range(len(results)), key=lambda i: Fraction(results[i][0]["size"]))
    results = [results[i] for i in order]
    rows = [r for r, _ in results]
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    meta = {"system_digest": system.digest(), "norm": system.norm.to_json(), "method": method,
            "precision": bits, "rows": len(rows), "output": args.output}
    if args.timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    tolerance = spec.get("tolerance")
    failed = [(i, err) for i, (_, err) in enumerate(results) if err is not None]
    if failed:
        i, (name, msg, code) = failed[0]
        meta.update(status="error", first_error={"row": rows[i], "error": name, "message": msg})
        _emit(meta)
        print(f"{name}: {msg}", file=sys.stderr)
        return code
    bad = _violations(rows, tolerance) if tolerance is not None else None
    if bad is not None:
        meta.update(status="tolerance-violation", tolerance=tolerance, first_violation=rows[bad])
        _emit(meta)
        print(f"tolerance {tolerance!r} violated at n = {rows[bad]['n']}: rel_error {rows[bad]['rel_error']}",
              file=sys.stderr)
        return ToleranceViolation.exit_code
    meta.update(status="ok", tolerance=tolerance)
    _emit(meta)
    return EXIT_OK


# -- canned applications ----------------------------------------------------


def _density_table(args, out):
    from .applications.airy import map_airy_density

    count = int(round((args.x_max - args.x_min) / args.x_step)) + 1
    xs = np.round(args.x_min + args.x_step * np.arange(count), 10)
    ys = map_airy_density(xs)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "density"])
    for x, y in zip(xs, ys):
        writer.writerow([repr(float(x) + 0.0), repr(float(y))])


def cmd_app(args):
    from .applications import planar, trivariate

    code = EXIT_OK
    table_to_stdout = args.emit_density_table == "-"
    if args.app is None:
        if args.emit_density_table is None:
            raise ValueError("give an application (trivariate, planar-core) or --emit-density-table")
    elif table_to_stdout:
        raise ValueError("with a query, --emit-density-table needs a file path")

    if args.app == "trivariate":
        if len(args.query) != 3:
            raise ValueError("trivariate takes n k t")
        q = trivariate.TrivariateQuery(*args.query)
        method = args.method or "auto"
        exact = trivariate.trivariate_exact(q)
        out = {"query": {"n": q.n, "k": q.k, "t": q.t}, "exponents": list(q.exponents),
               "exact": exact.to_json()}
        if method != "none":
            est = trivariate.trivariate_estimate(q, method)
            out["estimate"] = est.to_json()
            out["rel_error"] = repr(est.rel_error(exact))
        _emit(out)
    elif args.app == "planar-core":
        if len(args.query) != 2:
            raise ValueError("planar-core takes n k")
        q = planar.PlanarCoreQuery(*args.query)
        method = args.method or "quadrature"
        exact = planar.planar_core_exact(q)
        out = {"query": {"n": q.n, "k": q.k}, "exponents": list(q.exponents), "exact": exact.to_json()}
        if method != "none":
            est = planar.planar_core_estimate(q, method)
            out["estimate"] = est.to_json()
            out["rel_error"] = repr(est.rel_error(exact))
        if args.m_file or args.c_file:
            if not (args.m_file and args.c_file):
                raise ValueError("--m-file and --c-file go together")
            p = planar.p_nk(q, planar.read_sequence(args.m_file), planar.read_sequence(args.c_file))
            out["p_nk"] = str(p)
            out["p_nk_float"] = repr(float(p))
            out["airy_local_limit"] = repr(planar.airy_local_limit(q.n, q.k))
        _emit(out)

    if args.emit_density_table is not None:
        if table_to_stdout:
            _density_table(args, sys.stdout)
        else:
            with open(args.emit_density_table, "w", newline="") as fh:
                _density_table(args, fh)
    return code


# ---------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="mantissa bits for multiprecision steps (default 128 or $MIXEDPOWERS_PRECISION)")

    parser = argparse.ArgumentParser(prog="mixedpowers", parents=[common],
                                     description="Exact and asymptotic coefficients of mixed powers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", parents=[common], help="exact coefficient")
    p.add_argument("system")
    p.add_argument("n", type=_vector)
    p.add_argument("--reduce", action="store_true", help="strip powers of z from factors vanishing at 0")
    p.set_defaults(func=cmd_oracle)

    for name, func, helptext in (("critical", cmd_critical, "critical point of a direction"),
                                 ("phase", cmd_phase, "Taylor expansion of the phase term")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("system")
        p.add_argument("n", type=_vector, nargs="?")
        p.add_argument("--direction", help="explicit direction, e.g. '2/9,1,1/9'")
        if name == "phase":
            p.add_argument("--order", type=int, default=4)
            p.add_argument("--check", action="store_true", help="also run the phase-term property checks")
            p.add_argument("--grid", type=int, default=101)
        p.set_defaults(func=func)

    p = sub.add_parser("estimate", parents=[common], help="asymptotic estimate")
    p.add_argument("system")
    p.add_argument("n", type=_vector)
    p.add_argument("--method", choices=se.METHODS, default="auto")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--reduce", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", parents=[common], help="regression sweep against the exact oracle")
    p.add_argument("system")
    p.add_argument("sweep", help="JSON sweep spec")
    p.add_argument("output", help="CSV output path")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: logical cores)")
    p.add_argument("--timestamp", action="store_true", help="record wall-clock time in the report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("app", parents=[common], help="canned applications")
    p.add_argument("app", nargs="?", choices=("trivariate", "planar-core"))
    p.add_argument("query", nargs="*", type=int)
    p.add_argument("--method", default=None,
                   help="trivariate: auto|gaussian|quadrature|small-limit|gaussian-formula|large-t; "
                        "planar-core: quadrature|gaussian|gaussian-corrected; 'none' skips the estimate")
    p.add_argument("--emit-density-table", nargs="?", const="-", default=None, metavar="PATH",
                   help="write the map-Airy density as CSV (stdout when no path is given)")
    p.add_argument("--x-min", type=float, default=-8.0)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--x-step", type=float, default=0.05)
    p.add_argument("--m-file", help="sequence file for M_n")
    p.add_argument("--c-file", help="sequence file for C_k")
    p.set_defaults(func=cmd_app)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is not None:
            set_precision(args.precision)
        return args.func(args)
    except CoalescenceError as exc:
        print(f"CoalescenceError: {exc} (hint: use --method quadrature)", file=sys.stderr)
        return exc.exit_code
    except ConstraintViolation as exc:
        hint = " (use --reduce to strip powers of z)" if exc.hypothesis == "H1" else ""
        print(f"ConstraintViolation [{exc.hypothesis}]: {exc}{hint}", file=sys.stderr)
        return exc.exit_code
    except MixedPowersError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    finally:
        if args.precision is not None:
            set_precision(None)


if __name__ == "__main__":
    sys.exit(main())
