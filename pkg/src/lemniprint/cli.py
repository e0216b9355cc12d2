"""Command-line interface: ``lemniprint <command> [flags]``.

Exit status 0 on success, 1 on a mathematical failure (non-proper input, no
matching reconstruction, ...), 2 on malformed input or I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .approx import DEFAULT_R, approximate_diffeo, default_trig_degree
from .conformal import recommended_resolution, trace_lemniscate
from .errors import LemniprintError, NotProper
from .fingerprint import fingerprint_report, hausdorff_distance
from .polynomial import DEFAULT_MIN_MARGIN, critical_data, is_proper
from .weld import count_classes, reconstruct_report


def _sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def cmd_proper(args) -> int:
    p = io.read_polynomial(args.poly)
    margin = DEFAULT_MIN_MARGIN if args.margin is None else args.margin
    try:
        L = is_proper(p, min_margin=margin)
    except NotProper as exc:
        print(str(exc))
        for w in critical_data(p).values:
            print(f"critical value {w.real:.12g}{w.imag:+.12g}j  |w| = {abs(w):.12g}")
        return 1
    print("proper")
    print(f"margin {round(L.margin, 12)!r}")
    for w in L.critical.values:
        print(f"critical value {w.real:.12g}{w.imag:+.12g}j  |w| = {abs(w):.12g}")
    return 0


def cmd_trace(args) -> int:
    L = is_proper(io.read_polynomial(args.poly))
    M = args.grid or max(recommended_resolution(L), 256)
    curve = trace_lemniscate(L, M)
    for f in io.emit_plot(curve, args.out):
        print(f)
    return 0


def cmd_fingerprint(args) -> int:
    L = is_proper(io.read_polynomial(args.poly))
    rep = fingerprint_report(L, args.grid)
    out = Path(args.out)
    files = io.emit_plot(rep.diffeo, out)
    side = _sidecar(out, ".json")
    io.write_blaschke(
        side,
        rep.blaschke,
        {
            "normalization": {
                "center": io._pair(rep.interior.center),
                "disk_zeros": [io._pair(a) for a in rep.disk_zeros],
                "branch": rep.branch,
                "grid": rep.diffeo.grid_size,
                "curve_grid": len(rep.interior.curve),
                "phase_error": rep.phase_error,
                "crosscheck_error": rep.crosscheck_error,
            }
        },
    )
    for f in files + [side]:
        print(f)
    return 0


def cmd_approx(args) -> int:
    psi = io.read_diffeo(args.diffeo)
    cfg = io.read_json(args.config) if args.config else {}
    n = args.n if args.n is not None else cfg.get("n")
    if not isinstance(n, int) or n < 1:
        raise io.InputError("approx needs a positive integer n (--n or config)")
    R = args.R if args.R is not None else cfg.get("R", DEFAULT_R)
    N = args.N if args.N is not None else cfg.get("N", default_trig_degree(psi.grid_size))
    B, report = approximate_diffeo(psi, n, float(R), int(N))
    out = Path(args.out)
    io.write_blaschke(out, B)
    errors = _sidecar(out, ".errors.json")
    io.write_json(errors, report.to_dict())
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0


def cmd_reconstruct(args) -> int:
    B = io.read_blaschke(args.blaschke)
    rep = reconstruct_report(B, M=args.grid, seed=args.seed)
    out = Path(args.out)
    io.write_polynomial(out, rep.lemniscate.poly)
    report = {
        "blaschke": io.blaschke_to_dict(B),
        "critical_values": [io._pair(w) for w in rep.critical_values],
        "candidates": [
            {"polynomial": io.polynomial_to_dict(p), "discrepancy": io.finite(d)}
            for p, d in zip(rep.candidates, rep.discrepancies)
        ],
        "chosen": io.polynomial_to_dict(rep.lemniscate.poly),
        "psi_solutions": rep.psi_solutions,
        "psi_expected": rep.psi_expected,
        "transport_error": rep.transport_error,
    }
    side = _sidecar(out, ".report.json")
    io.write_json(side, report)
    print(out)
    print(side)
    return 0


def cmd_count(args) -> int:
    if args.values:
        data = io.read_json(args.values)
        vals = data.get("values")
        if not isinstance(vals, list):
            raise io.InputError(f"{args.values}: need a 'values' list")
        w = np.array([io._complex(v, "values") for v in vals])
    elif args.n:
        rng = np.random.default_rng(args.seed)
        m = args.n - 1
        w = 0.8 * np.sqrt(rng.uniform(size=m)) * np.exp(2j * np.pi * rng.uniform(size=m))
    else:
        raise io.InputError("count needs --values or --n")
    if np.any(np.abs(w) >= 1):
        raise io.InputError("critical values must lie in the open unit disk")
    res = count_classes(w, seed=args.seed)
    print(
        json.dumps(
            {
                "polynomial_count": res.polynomial_count,
                "class_count": res.class_count,
                "psi_solutions": res.psi_solutions,
                "psi_expected": res.psi_expected,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_hausdorff(args) -> int:
    a = io.read_curve_points(args.curves[0])
    b = io.read_curve_points(args.curves[1])
    print("%.17g" % hausdorff_distance(a, b))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lemniprint", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for multistart stages")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        return sp

    sp = add("proper", cmd_proper, "check properness of a polynomial lemniscate")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--margin", type=float)

    sp = add("trace", cmd_trace, "trace the lemniscate (CSV + SVG)")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--grid", type=int)

    sp = add("fingerprint", cmd_fingerprint, "fingerprint of a proper lemniscate")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--grid", type=int)

    sp = add("approx", cmd_approx, "approximate a circle diffeo by a Blaschke root")
    sp.add_argument("--diffeo", required=True)
    sp.add_argument("--config")
    sp.add_argument("--out", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--R", type=float)
    sp.add_argument("--N", type=int)

    sp = add("reconstruct", cmd_reconstruct, "lemniscate with a given Blaschke fingerprint")
    sp.add_argument("--blaschke", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--grid", type=int)

    sp = add("count", cmd_count, "count EL polynomials and classes for given critical values")
    sp.add_argument("--values", help='JSON file {"values": [[re, im], ...]}')
    sp.add_argument("--n", type=int, help="degree; random critical values from --seed")

    sp = add("hausdorff", cmd_hausdorff, "Hausdorff distance between two curve CSVs")
    sp.add_argument("curves", nargs=2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LemniprintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
