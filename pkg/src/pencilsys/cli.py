"""Command-line front end.

Every subcommand reads one JSON system file and writes a JSON result
bundle (stdout unless ``--output``). Exit status is 0 on success, 2 when
the question has a "no" answer (singular pencil, inconsistent initial
state, singular step matrix) and 1 for unreadable input or crashes. A
bundle is still written for exit status 2.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys

import numpy as np
import sympy

from . import __version__
from . import linalg as la
from .continuous import (
    build_system,
    consistency_check,
    residual_check,
    solve_continuous,
    solve_via_fundamental,
)
from .discretize import SampleSequence, compare_with_continuous, discrete_simulate, discretize
from .errors import DomainError
from .nabla import (
    FractionalSystem,
    correspondence_diagnostic,
    fractional_residual,
    solve_fractional_system,
)
from .pencil import (
    Pencil,
    PencilClass,
    classify_pencil,
    det_polynomial,
    elementary_divisors,
    spectral_structure,
    verify_decomposition,
    weierstrass_decompose,
)
from .specfile import ParseError, SystemSpec, load_spec

COMMANDS = ("analyze", "solve", "discretize", "fracsim", "compare")


class _Failed(Exception):
    """A domain error raised after part of the bundle was filled in."""

    def __init__(self, bundle, exc):
        super().__init__(str(exc))
        self.bundle = bundle
        self.exc = exc


# -- serialization -------------------------------------------------------------

def _num(x):
    if isinstance(x, (sympy.Basic,)):
        z = complex(sympy.N(x, 20))
        return [z.real, z.imag] if z.imag else z.real
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    x = float(x)
    if math.isfinite(x):
        return x + 0.0  # folds -0.0
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return _num(obj)


def dump_bundle(bundle: dict) -> str:
    return json.dumps(jsonable(bundle), sort_keys=True, indent=1) + "\n"


def _eigen_entry(value, mult_key, mult, exact):
    entry = {"approx": _num(value) if not isinstance(value, (complex, np.complexfloating)) or value.imag
             else _num(value.real), mult_key: mult}
    if exact:
        entry["exact"] = str(value)
    if isinstance(entry["approx"], float):
        entry["approx"] = [entry["approx"], 0.0]
    return entry


def _table(columns, rows):
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def _state_columns(m):
    return [f"y{i + 1}" for i in range(m)]


# -- option resolution ----------------------------------------------------------

def _resolve(args, spec: SystemSpec) -> dict:
    o = spec.options

    def pick(flag, key, default):
        v = getattr(args, flag, None)
        return v if v is not None else o.get(key, default)

    opts = {
        "T": float(pick("T", "T", 0.1)),
        "order_n": float(pick("order_n", "order_n", 0.5)),
        "steps": int(pick("steps", "steps", 20)),
        "exact": bool(args.exact or o.get("exact", False)),
        "project": bool(args.project),
        "crosscheck": bool(args.crosscheck),
        "stencil": args.stencil,
        "history": args.history,
        "t_end": float(args.t_end if args.t_end is not None else spec.grid["t_end"]),
        "points": int(args.points if args.points is not None else spec.grid["points"]),
    }
    tol = spec.tolerance(rank_tol=args.rank_tol)
    opts.update(rank_tol=tol.rank_tol, residual_tol=tol.residual_tol, cluster_tol=tol.cluster_tol)
    if opts["T"] <= 0:
        raise ParseError("T", "sampling period must be positive")
    if opts["steps"] < 0:
        raise ParseError("steps", "must be nonnegative")
    if opts["points"] < 1:
        raise ParseError("points", "must be positive")
    return opts


def _header(command, spec, opts):
    return {
        "tool": "pencilsys",
        "version": __version__,
        "command": command,
        "input_digest": hashlib.sha256(spec.raw).hexdigest(),
        "options": dict(opts),
        "verdicts": {},
        "tables": {},
        "diagnostics": {},
    }


def _tolerance(opts):
    return la.Tolerance(opts["rank_tol"], opts["residual_tol"], opts["cluster_tol"])


def _initial_state(sys_, spec, opts, bundle, V):
    report = consistency_check(sys_, spec.Y0, V, spec.t0)
    bundle["verdicts"]["consistent"] = report.consistent
    bundle["verdicts"]["consistency_defect"] = report.defect
    if report.consistent:
        return spec.Y0
    if opts["project"]:
        bundle["diagnostics"]["warning"] = "Y0 inconsistent; replaced by its projection"
        bundle["verdicts"]["projected_Y0"] = report.projected_Y0
        return report.projected_Y0
    return spec.Y0


def _input_samples(V, T, lo, stop, history):
    if history == "signal" or lo >= 0:
        return SampleSequence(lo, V.samples(T, lo, stop))
    return SampleSequence(0, V.samples(T, 0, stop)).extended_back(lo)


# -- commands -------------------------------------------------------------------

def cmd_analyze(spec: SystemSpec, opts: dict) -> dict:
    bundle = _header("analyze", spec, opts)
    tol = _tolerance(opts)
    pencil = Pencil(spec.F, spec.G, exact=opts["exact"])
    v = bundle["verdicts"]
    v["m"] = pencil.m
    poly = det_polynomial(pencil, tol)
    bundle["diagnostics"]["det_polynomial"] = {
        "coeffs_lowest_first": [str(c) if opts["exact"] else c for c in poly.coeffs],
        "degree": poly.degree,
    }
    cls = classify_pencil(pencil, tol)
    v["regularity"] = cls.value
    if cls is PencilClass.Singular:
        return bundle
    spectral = spectral_structure(pencil, tol)
    v["p"], v["q"] = spectral.p, spectral.q
    v["eigenvalues"] = [_eigen_entry(val, "multiplicity", k, opts["exact"])
                        for val, k in spectral.finite_eigenvalues]
    dec = weierstrass_decompose(pencil, tol)
    v["q_star"] = dec.q_star
    if opts["exact"]:
        divisors = elementary_divisors(pencil)
        bundle["tables"]["elementary_divisors"] = {
            "finite": [_eigen_entry(a, "degree", k, True) for a, k in divisors.finite],
            "infinite": list(divisors.infinite),
        }
    bundle["tables"]["jordan_blocks"] = {
        "finite": [_eigen_entry(lam, "size", k, False) for lam, k in dec.finite_blocks],
        "infinite": list(dec.infinite_blocks),
    }
    res_F, res_G = verify_decomposition(dec, pencil)
    bundle["diagnostics"]["decomposition_residuals"] = {"F": res_F, "G": res_G}
    bundle["diagnostics"]["shift"] = dec.shift
    return bundle


def _system(spec, opts):
    return build_system(spec.F, spec.G, spec.B, _tolerance(opts))


def cmd_solve(spec: SystemSpec, opts: dict) -> dict:
    bundle = _header("solve", spec, opts)
    sys_ = _system(spec, opts)
    V = spec.input
    bundle["verdicts"].update(p=sys_.dec.p, q=sys_.dec.q, q_star=sys_.dec.q_star)
    Y0 = _initial_state(sys_, spec, opts, bundle, V)
    grid = np.linspace(spec.t0, opts["t_end"], opts["points"])
    try:
        traj = solve_continuous(sys_, Y0, V, grid, t0=spec.t0)
    except DomainError as exc:
        raise _Failed(bundle, exc) from None
    bundle["tables"]["trajectory"] = _table(
        ["index", "time", *_state_columns(sys_.m)],
        [[k, t, *y] for k, (t, y) in enumerate(zip(traj.times, traj.states))])
    bundle["diagnostics"]["residual"] = residual_check(sys_, traj, V) if grid.size >= 3 else None
    if opts["crosscheck"]:
        other = solve_via_fundamental(sys_, Y0, V, grid, t0=spec.t0)
        bundle["diagnostics"]["crosscheck_max_difference"] = la.maxabs(other.states - traj.states)
    bundle["_csv"] = bundle["tables"]["trajectory"]
    return bundle


def cmd_discretize(spec: SystemSpec, opts: dict) -> dict:
    bundle = _header("discretize", spec, opts)
    sys_ = _system(spec, opts)
    V = spec.input
    T, K = opts["T"], opts["steps"]
    dsys = discretize(sys_, T, opts["stencil"])
    bundle["verdicts"].update(p=sys_.dec.p, q=sys_.dec.q, q_star=sys_.dec.q_star,
                              memory_depth=dsys.memory_depth)
    Y0 = _initial_state(sys_, spec, opts, bundle, V)
    bundle["tables"]["A"] = dsys.A
    bundle["tables"]["Phi_int"] = dsys.Phi_int
    bundle["tables"]["fast_coeffs"] = [{"order": i, "matrix": C, "weights": list(w)}
                                       for i, (C, w) in enumerate(zip(dsys.fast_coeffs, dsys.fast_weights))]
    lo = -(dsys.q_star - 1) if dsys.q_star > 1 else 0
    inputs = _input_samples(V, T, lo, K + 2, opts["history"])
    seq = discrete_simulate(dsys, Y0, inputs, K)
    bundle["tables"]["samples"] = _table(
        ["index", "time", *_state_columns(sys_.m)],
        [[k, k * T, *seq[k]] for k in range(K + 1)])
    bundle["_csv"] = bundle["tables"]["samples"]
    return bundle


def _fractional_inputs(spec, T, K):
    V = spec.input
    return SampleSequence(0, (spec.B @ V.samples(T, 0, K + 1).T).T)


def cmd_fracsim(spec: SystemSpec, opts: dict) -> dict:
    bundle = _header("fracsim", spec, opts)
    K, n = opts["steps"], opts["order_n"]
    fsys = FractionalSystem(spec.F, spec.G, n, _tolerance(opts))
    bundle["verdicts"]["step_invertible"] = fsys.step_invertible
    inputs = _fractional_inputs(spec, opts["T"], K)
    seq = solve_fractional_system(fsys, inputs, spec.Y0, K)
    bundle["tables"]["sequence"] = _table(
        ["index", "time", *_state_columns(spec.m)],
        [[k, k * opts["T"], *seq[k]] for k in range(K + 1)])
    bundle["diagnostics"]["residual"] = fractional_residual(fsys, seq, inputs, K)
    bundle["_csv"] = bundle["tables"]["sequence"]
    return bundle


def cmd_compare(spec: SystemSpec, opts: dict) -> dict:
    bundle = _header("compare", spec, opts)
    K, T, n = opts["steps"], opts["T"], opts["order_n"]
    if K == 0:
        return bundle
    sys_ = _system(spec, opts)
    V = spec.input
    Y0 = _initial_state(sys_, spec, opts, bundle, V)
    times = T * np.arange(K + 1)
    try:
        cont = solve_continuous(sys_, Y0, V, spec.t0 + times, t0=spec.t0)
    except DomainError as exc:
        raise _Failed(bundle, exc) from None
    dsys = discretize(sys_, T, opts["stencil"])
    lo = -(dsys.q_star - 1) if dsys.q_star > 1 else 0
    inputs = _input_samples(V, T, lo, K + 2, opts["history"])
    disc = discrete_simulate(dsys, Y0, inputs, K)

    report = correspondence_diagnostic(dsys, spec.F, n, K, inputs=inputs)
    frac = None
    fsys = FractionalSystem(spec.F, spec.G, n, _tolerance(opts))
    if fsys.step_invertible:
        frac = solve_fractional_system(fsys, SampleSequence(0, report.aggregate_inputs), Y0, K)
    else:
        bundle["diagnostics"]["fractional"] = "F - G singular; fractional run skipped"

    rows = []
    for k in range(K + 1):
        e_dc = la.maxabs(disc[k] - cont.states[k])
        row = [k, times[k], e_dc]
        if frac is not None:
            row += [la.maxabs(frac[k] - cont.states[k]), la.maxabs(frac[k] - disc[k])]
        else:
            row += [None, None]
        rows.append(row)
    bundle["tables"]["errors"] = _table(
        ["index", "time", "discrete_vs_continuous", "fractional_vs_continuous", "fractional_vs_discrete"], rows)
    bundle["tables"]["lag_deltas"] = _table(["lag", "delta"],
                                            [[d + 1, delta] for d, delta in enumerate(report.deltas)])
    bundle["tables"]["aggregate_inputs"] = report.aggregate_inputs
    v = bundle["verdicts"]
    v.update(p=sys_.dec.p, q=sys_.dec.q, q_star=sys_.dec.q_star)
    v["max_discrete_error"] = max(r[2] for r in rows)
    if frac is not None:
        v["max_fractional_error"] = max(r[3] for r in rows)
    v["correspondence"] = report.verdict
    bundle["diagnostics"]["correspondence"] = {
        "order_n": report.n, "best_n": report.best_n, "best_objective": report.best_objective,
        "max_delta": max(report.deltas),
    }
    err, order = compare_with_continuous(sys_, dsys, Y0, V, K)
    bundle["diagnostics"]["observed_order"] = order
    bundle["_csv"] = _table(["index", "time", *_state_columns(sys_.m)],
                            [[k, times[k], *disc[k]] for k in range(K + 1)])
    return bundle


_HANDLERS = {"analyze": cmd_analyze, "solve": cmd_solve, "discretize": cmd_discretize,
             "fracsim": cmd_fracsim, "compare": cmd_compare}


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pencilsys", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--T", type=float, dest="T", help="sampling period")
        p.add_argument("--order-n", type=float, help="fractional order n")
        p.add_argument("--steps", type=int, help="number of discrete steps")
        p.add_argument("--project", action="store_true", help="project an inconsistent Y0 instead of failing")
        p.add_argument("--crosscheck", action="store_true", help="also run the fundamental-matrix solver")
        p.add_argument("--exact", action="store_true", help="exact rational pencil analysis")
        p.add_argument("--rank-tol", type=float)
        p.add_argument("--csv", metavar="PATH", help="write the main trajectory as CSV")
        p.add_argument("--t-end", type=float)
        p.add_argument("--points", type=int)
        p.add_argument("--stencil", choices=("consistent", "alternating"), default="consistent")
        p.add_argument("--history", choices=("signal", "hold"), default="signal",
                       help="input samples before t=0: from the signal or by holding V(0)")
        p.add_argument("--output", "-o", metavar="PATH", help="bundle destination (default stdout)")
    return parser


def _write_csv(path, table):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table["columns"])
        for row in table["rows"]:
            w.writerow([repr(_num(x)) if not isinstance(x, int) else x for x in row])


def _emit(bundle, args):
    table = bundle.pop("_csv", None)
    text = dump_bundle(bundle)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv and table is not None:
        _write_csv(args.csv, table)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.file)
        opts = _resolve(args, spec)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    failure = None
    try:
        bundle = _HANDLERS[args.command](spec, opts)
    except _Failed as failed:
        bundle, failure = failed.bundle, failed.exc
    except DomainError as exc:
        bundle, failure = _header(args.command, spec, opts), exc
    except Exception as exc:  # noqa: BLE001 - report any crash with status 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if failure is None:
        _emit(bundle, args)
        singular = bundle["verdicts"].get("regularity") == PencilClass.Singular.value
        return 2 if args.command == "analyze" and singular else 0
    bundle.pop("_csv", None)
    bundle["error"] = {"type": type(failure).__name__, "message": str(failure)}
    print(f"error: {failure}", file=sys.stderr)
    _emit(bundle, args)
    return 2

if __name__ == "__main__":
    sys.exit(main())
