"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 a verification ran and failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, decimation, graph, oracle, schur
from .errors import SpecDecError

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _branch_count(text):
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if m < 3:
        raise argparse.ArgumentTypeError(f"m must be >= 3, got {m}")
    return m


def _depth(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"n must be >= 0, got {n}")
    return n


def _csv_bytes(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode()


def _json_bytes(doc):
    return (json.dumps(doc, indent=2) + "\n").encode()


def _emit(args, data: bytes):
    if args.out in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(args.out).write_bytes(data)


def _fmt(args, default="csv"):
    return getattr(args, "format", None) or default


# --- subcommands -----------------------------------------------------------


def cmd_graph(args):
    g = graph.build_graph(args.m, args.n)
    _emit(args, graph.export_graph(g, _fmt(args)))
    return EXIT_OK


def cmd_spectrum(args):
    report = decimation.spectrum_closed_form(args.m, args.n) if args.closed_form else decimation.spectrum(args.m, args.n)
    _emit(args, decimation.export_spectrum(report, _fmt(args)))
    if args.plot:
        from .plotting import plot_spectrum

        plot_spectrum(report, args.plot)
    return EXIT_OK


def cmd_oracle_check(args):
    diff = oracle.oracle_check(args.m, args.n, args.cluster_tol, args.value_tol)
    if _fmt(args, "json") == "json":
        _emit(args, (diff.to_json() + "\n").encode())
    else:
        rows = [(e.label, e.value, e.expected_mult, e.observed_mult, e.value_error) for e in diff.entries]
        _emit(args, _csv_bytes(("atom", "value", "expected_mult", "observed_mult", "abs_value_error"), rows))
    return EXIT_OK if diff.ok else EXIT_FAILED


def cmd_schur_check(args):
    rng = np.random.default_rng(args.rng_seed)
    zs = schur.random_nonexceptional(args.m, args.samples, rng)
    report = schur.verification_report(args.m, zs)
    ok = report["max_residual"] < schur.RESIDUAL_TOL and all(report["projectors"].values())
    report["ok"] = ok
    if _fmt(args, "json") == "json":
        _emit(args, _json_bytes(report))
    else:
        keys = ("z", "residual", "phi_recovered_error", "R_recovered_error", "resolvent_route_error")
        _emit(args, _csv_bytes(keys, [[r[k] for k in keys] for r in report["samples"]]))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_measure(args):
    measure = analysis.spectral_measure(args.m, args.n)
    if _fmt(args) == "csv":
        _emit(args, measure.to_csv())
    else:
        xs, cum = measure.cumulative()
        doc = {
            "m": args.m,
            "n": args.n,
            "atoms": [
                {"value": float(node.value), "weight_numerator": w.numerator, "weight_denominator": w.denominator}
                for node, w in measure.atoms
            ],
            "plot_data": {"value": xs.tolist(), "cumulative_weight": cum.tolist()},
        }
        _emit(args, _json_bytes(doc))
    if args.plot:
        from .plotting import plot_measure

        plot_measure(measure, args.plot)
    return EXIT_OK


def cmd_julia(args):
    pts = analysis.julia_backward_orbit(args.m, args.generations, args.seed)
    if _fmt(args) == "csv":
        _emit(args, _csv_bytes(("point",), [[repr(float(x))] for x in pts]))
    else:
        _emit(args, _json_bytes({"m": args.m, "generations": args.generations, "points": pts.tolist()}))
    if args.plot:
        from .plotting import plot_orbit

        plot_orbit(args.m, pts, args.plot)
    return EXIT_OK


def cmd_dims(args):
    r = analysis.dimension_report(args.m)
    row = {"m": r.m, "moran": r.moran, "paper": r.paper, "discrepancy": r.discrepancy}
    if _fmt(args) == "csv":
        _emit(args, _csv_bytes(tuple(row), [list(row.values())]))
    else:
        _emit(args, _json_bytes(row))
    return EXIT_OK


def cmd_resistance(args):
    g = graph.build_graph(args.m, args.n)
    value = oracle.effective_resistance(g, args.u, args.v)
    row = {"m": args.m, "n": args.n, "u": args.u, "v": args.v, "resistance": value}
    ok = True
    if args.u in g.boundary and args.v in g.boundary:
        expected = 2**args.n * 2 / args.m
        ok = abs(value - expected) <= 1e-9
        row.update(expected=expected, ok=ok)
    if _fmt(args) == "csv":
        _emit(args, _csv_bytes(tuple(row), [list(row.values())]))
    else:
        _emit(args, _json_bytes(row))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_report(args):
    """Delimited outputs plus figures for one (m, n) into a directory."""
    from .plotting import plot_measure, plot_orbit, plot_spectrum

    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    report = decimation.spectrum(args.m, args.n)
    measure = analysis.spectral_measure(args.m, args.n)
    pts = analysis.julia_backward_orbit(args.m, args.generations)
    (out / "spectrum.csv").write_bytes(decimation.export_spectrum(report, "csv"))
    (out / "measure.csv").write_bytes(measure.to_csv())
    (out / "orbit.csv").write_bytes(_csv_bytes(("point",), [[repr(float(x))] for x in pts]))
    plot_spectrum(report, out / "spectrum.png")
    plot_measure(measure, out / "measure.png")
    plot_orbit(args.m, pts, out / "orbit.png")
    status = EXIT_OK
    if graph.num_vertices(args.m, args.n) <= oracle.MAX_DIM:
        diff = oracle.oracle_check(args.m, args.n)
        (out / "oracle_diff.json").write_text(diff.to_json() + "\n")
        status = EXIT_OK if diff.ok else EXIT_FAILED
    _emit(args, "\n".join(sorted(p.name for p in out.iterdir())).encode() + b"\n")
    return status


# --- parser ----------------------------------------------------------------


def _add_format(p, choices, default):
    grp = p.add_mutually_exclusive_group()
    for c in choices:
        grp.add_argument(f"--{c}", dest="format", action="store_const", const=c, help=f"{c.upper()} output")
    p.set_defaults(format=default)


def build_parser():
    parser = _Parser(prog="specdec", description="Spectral decimation on m-branch tree graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, func, help, n=True):
        p = sub.add_parser(name, help=help)
        p.add_argument("--m", type=_branch_count, required=True, help="branch count (>= 3)")
        if n:
            p.add_argument("--n", type=_depth, default=1, help="approximation depth (>= 0)")
        p.add_argument("--out", default="-", help="output file (default stdout)")
        p.set_defaults(func=func)
        return p

    p = add("graph", cmd_graph, "export V_{m,n}")
    _add_format(p, ("csv", "dot"), "csv")

    p = add("spectrum", cmd_spectrum, "eigenvalues with multiplicities")
    _add_format(p, ("csv", "json"), "csv")
    p.add_argument("--closed-form", action="store_true", help="use the closed formulas instead of the recursion")
    p.add_argument("--plot", help="write a figure to this path")

    p = add("oracle-check", cmd_oracle_check, "compare against a dense eigensolve")
    _add_format(p, ("csv", "json"), "json")
    p.add_argument("--cluster-tol", type=float, default=oracle.CLUSTER_TOL)
    p.add_argument("--value-tol", type=float, default=oracle.VALUE_TOL)

    p = add("schur-check", cmd_schur_check, "verify the Schur-complement identity and projectors", n=False)
    _add_format(p, ("csv", "json"), "json")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--rng-seed", type=int, default=0)

    p = add("measure", cmd_measure, "normalized eigenvalue-counting measure")
    _add_format(p, ("csv", "json"), "csv")
    p.add_argument("--plot", help="write a figure to this path")

    p = add("julia", cmd_julia, "backward orbit of m/(m-1) under R", n=False)
    _add_format(p, ("csv", "json"), "csv")
    p.add_argument("--generations", type=int, default=12)
    p.add_argument("--seed", type=float, default=None, help="orbit seed in [0, m/(m-1)] (default m/(m-1))")
    p.add_argument("--plot", help="write a figure to this path")

    p = add("dims", cmd_dims, "similarity dimension under both conventions", n=False)
    _add_format(p, ("csv", "json"), "json")

    p = add("resistance", cmd_resistance, "effective resistance between two vertices")
    _add_format(p, ("csv", "json"), "json")
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--v", type=int, default=1)

    p = add("report", cmd_report, "CSV outputs and figures into a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--generations", type=int, default=12)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (SpecDecError, IndexError, ValueError) as exc:
        print(f"specdec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
