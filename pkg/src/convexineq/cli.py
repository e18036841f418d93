"""Command-line front end.

Subcommands
-----------
verify    run one inequality verifier, write a JSON report
constant  compute a sharp constant with an error estimate
sweep     sweep one parameter, write a CSV table
region    admissible-region verdicts and the boundary curve, CSV

Exit status: 0 holds/equality, 2 violated, 64 usage error, 65 inadmissible
parameters.  ``CONVEXINEQ_OUTDIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .inequalities import (ParamSet, InadmissibleParams, theta_solve,
                           param_region, region_boundary, sharp_constant,
                           lp_logsob_constant, INEQUALITY_IDS, verify,
                           default_params, needs_h)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VIOLATED = 2
EXIT_USAGE = 64
EXIT_INADMISSIBLE = 65

_CONSTANT_KINDS = ("sobolev", "gn+", "gn-", "gn-concave", "sobolev-trace",
                   "gn-trace", "lp-logsob")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _outpath(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    outdir = Path(os.environ.get("CONVEXINEQ_OUTDIR", "."))
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir / default_name


def _write_report(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True))
    print(f"wrote {path}")


def _params_from_args(args, ineq_id=None) -> ParamSet:
    base = default_params(ineq_id) if ineq_id else ParamSet(2, 2.0, 2.0)
    n = args.n if args.n is not None else base.n
    a = args.a if args.a is not None else base.a
    if args.p is not None:
        p = args.p
    elif args.q is not None:
        p = args.q / (args.q - 1.0)
    else:
        p = base.p
    return ParamSet(n, a, p)


def _add_param_flags(sp):
    sp.add_argument("--n", type=int, default=None, help="dimension")
    sp.add_argument("--a", type=float, default=None, help="convexity-dimension parameter")
    sp.add_argument("--p", type=float, default=None, help="gradient integrability exponent")
    sp.add_argument("--q", type=float, default=None, help="conjugate exponent (alternative to --p)")
    sp.add_argument("--out", default=None, help="output file")


def _run_verify(args) -> int:
    t0 = time.perf_counter()
    ps = _params_from_args(args, args.ineq)
    try:
        report = verify(args.ineq, ps, h=args.h, seed=args.seed, eps=args.eps,
                        equality=args.equality_case, resolution=args.resolution,
                        beta=args.beta)
    except InadmissibleParams as exc:
        sys.stderr.write(f"inadmissible parameters: {exc}\n")
        return EXIT_INADMISSIBLE
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "config": {
            "ineq": args.ineq, "params": ps.as_dict(), "h": report.h,
            "seed": report.seed, "eps": report.eps,
            "equality_case": args.equality_case,
            "resolutions": [report.resolution, report.resolution_low],
        },
        "result": report.as_dict(),
        "duration_seconds": time.perf_counter() - t0,
    }
    _write_report(_outpath(args, f"verify_{args.ineq}.json"), payload)
    print(f"{args.ineq}: verdict={report.verdict} gap={report.gap:.6e} "
          f"budget={report.budget:.2e}")
    return EXIT_VIOLATED if report.verdict == "violated" else EXIT_OK


def _run_constant(args) -> int:
    t0 = time.perf_counter()
    ps = _params_from_args(args)
    try:
        if args.kind == "lp-logsob":
            value = lp_logsob_constant(ps)
        else:
            value = sharp_constant(args.kind, ps)
        value10 = (lp_logsob_constant(ps, resolution=5120) if args.kind == "lp-logsob"
                   else sharp_constant(args.kind, ps, method="de", resolution=5120))
    except InadmissibleParams as exc:
        sys.stderr.write(f"inadmissible parameters: {exc}\n")
        return EXIT_INADMISSIBLE
    extremal_desc = {
        "sobolev": "(1 + ||x||^q)^((p-n)/p)",
        "gn+": "(1 + ||x||^q)^((p-a)/p)",
        "gn-": "(1 + ||x||^q)^((p-a)/p)",
        "gn-concave": "(1 - ||x||^q)_+^((a+p)/p)",
        "sobolev-trace": "||z + e||^(-(n-p)/(p-1))",
        "gn-trace": "||z + e||^(-(a-p)/(p-1))",
        "lp-logsob": "exp(-(||x||^q + C)/p)",
    }[args.kind]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "constant",
        "config": {"kind": args.kind, "params": ps.as_dict()},
        "result": {
            "value": value,
            "error_estimate": abs(value - value10),
            "cross_pipeline_value": value10,
            "extremal": extremal_desc,
        },
        "duration_seconds": time.perf_counter() - t0,
    }
    _write_report(_outpath(args, f"constant_{args.kind.replace('+','plus').replace('-','_')}.json"),
                  payload)
    print(f"{args.kind}: {value!r} (cross-pipeline agreement {abs(value - value10):.2e})")
    return EXIT_OK


def _parse_range(spec: str):
    # "lo:hi:count" or "lo:hi:count:log"
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ValueError("range must be lo:hi:count[:log]")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if len(parts) == 4 and parts[3] == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _run_sweep(args) -> int:
    ranged = [name for name in ("a_range", "p_range", "h_range")
              if getattr(args, name) is not None]
    if len(ranged) != 1:
        sys.stderr.write("error: exactly one of --a-range/--p-range/--h-range is required\n")
        return EXIT_USAGE
    name = ranged[0]
    values = _parse_range(getattr(args, name))
    rows = []
    header = None
    for v in values:
        if name == "a_range":
            ps = ParamSet(args.n or 2, float(v), args.p or 2.0)
        elif name == "p_range":
            ps = ParamSet(args.n or 2, args.a if args.a is not None else 2.0, float(v))
        else:
            ps = _params_from_args(args, args.ineq)
        try:
            if args.quantity == "theta":
                theta = theta_solve(args.kind, ps.n, ps.p, ps.a)
                header = ["value", "theta", "residual"]
                from .inequalities import theta_residual
                rows.append([v, theta, theta_residual(args.kind, ps.n, ps.p, ps.a, theta)])
            elif args.quantity == "constant":
                c = sharp_constant(args.kind, ps)
                c10 = sharp_constant(args.kind, ps, method="de", resolution=5120)
                header = ["value", "constant", "error_estimate"]
                rows.append([v, c, abs(c - c10)])
            elif args.quantity == "gap":
                rep = verify(args.ineq, ps, h=(float(v) if name == "h_range" else args.h),
                             equality=args.equality_case, seed=args.seed,
                             resolution=args.resolution)
                header = ["value", "gap", "budget", "verdict"]
                rows.append([v, rep.gap, rep.budget, rep.verdict])
            elif args.quantity == "region":
                ok = param_region(ps.n, ps.a, ps.p)
                bound = region_boundary(ps.n, np.array([ps.a]))[0]
                header = ["value", "admissible", "p_bound"]
                rows.append([v, int(ok), bound])
            else:
                sys.stderr.write(f"error: unknown quantity {args.quantity}\n")
                return EXIT_USAGE
        except InadmissibleParams as exc:
            sys.stderr.write(f"inadmissible parameters at {name}={v}: {exc}\n")
            return EXIT_INADMISSIBLE
    path = _outpath(args, f"sweep_{args.quantity}.csv")
    _write_csv(path, header, rows)
    return EXIT_OK


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for c in row:
            if isinstance(c, float) and math.isinf(c):
                cells.append("inf")
            elif isinstance(c, float):
                cells.append(repr(c))
            else:
                cells.append(str(c))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def _run_region(args) -> int:
    if args.a_range is None:
        sys.stderr.write("error: region needs --a-range\n")
        return EXIT_USAGE
    avals = _parse_range(args.a_range)
    n = args.n or 4
    bounds = region_boundary(n, avals)
    rows = []
    for a, b in zip(avals, bounds):
        row = [a, b]
        if args.p is not None:
            row.append(int(param_region(n, float(a), args.p)))
        rows.append(row)
    header = ["a", "p_bound"] + (["admissible"] if args.p is not None else [])
    _write_csv(_outpath(args, "region.csv"), header, rows)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _Parser(prog="convexineq",
                     description="verify sharp convex-analysis inequalities numerically")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="run one inequality verifier")
    sp.add_argument("--ineq", required=True, choices=INEQUALITY_IDS)
    _add_param_flags(sp)
    sp.add_argument("--h", type=float, default=None, help="semigroup time")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--eps", type=float, default=0.1, help="perturbation amplitude")
    sp.add_argument("--beta", type=float, default=None, help="concave power for BBLPHI-DYN")
    sp.add_argument("--equality-case", action="store_true")
    sp.add_argument("--resolution", type=int, default=None)
    sp.set_defaults(func=_run_verify)

    sp = sub.add_parser("constant", help="compute a sharp constant")
    sp.add_argument("--kind", required=True, choices=_CONSTANT_KINDS)
    _add_param_flags(sp)
    sp.set_defaults(func=_run_constant)

    sp = sub.add_parser("sweep", help="sweep one parameter into a CSV table")
    sp.add_argument("--quantity", required=True,
                    choices=("theta", "constant", "gap", "region"))
    sp.add_argument("--kind", default="gn+", help="family for theta/constant sweeps")
    sp.add_argument("--ineq", default=None, choices=INEQUALITY_IDS)
    _add_param_flags(sp)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--equality-case", action="store_true")
    sp.add_argument("--resolution", type=int, default=None)
    sp.add_argument("--a-range", default=None, help="lo:hi:count[:log]")
    sp.add_argument("--p-range", default=None, help="lo:hi:count[:log]")
    sp.add_argument("--h-range", default=None, help="lo:hi:count[:log]")
    sp.set_defaults(func=_run_sweep)

    sp = sub.add_parser("region", help="admissible-region boundary table")
    _add_param_flags(sp)
    sp.add_argument("--a-range", default=None, help="lo:hi:count[:log]")
    sp.set_defaults(func=_run_region)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
