"""Command-line front end.

Exit codes: 0 success, 1 verification found a violated bound, 2 usage error,
3 I/O error.
"""
import argparse
import contextlib
import csv
import json
import math
import sys

import numpy as np

from . import inequality_lab as lab_mod
from .errors import CompBernError
from .functions import CORPUS, CORPUS_BY_LABEL
from .moduli import DEFAULT_GRID, Moduli
from .operator_core import OperatorParams, composite_eval, iterate_eval, piecewise_linear_interp, second_moment
from .quadrature import DEFAULT_TOL, apply_rule, build_rule, c2_error_bound, reference_integral

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(sp, *, fn=True, fn2=False, x=False, r=False):
    sp.add_argument("--n", type=int, help="Bernstein degree per piece")
    sp.add_argument("--m", type=int, help="number of uniform pieces")
    if r:
        sp.add_argument("--r", type=int, default=1, help="number of iterations")
    if fn:
        sp.add_argument("--fn", dest="fn_label", help="corpus function label")
    if fn2:
        sp.add_argument("--fn2", dest="fn2_label", help="second corpus function label")
    if x:
        sp.add_argument("--x", type=float, help="single evaluation point in [0, 1]")
    sp.add_argument("--grid", type=int, default=201, help="output sampling resolution")
    sp.add_argument("--modgrid", type=int, default=DEFAULT_GRID, help="modulus grid size N")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="reference integrator tolerance")
    sp.add_argument("--out-format", choices=("json", "csv", "text"), default="json")
    sp.add_argument("--out-path", help="write output here instead of stdout")


def build_parser():
    p = _Parser(prog="compbern", description="Composite Bernstein operators and their bounds.")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    _add_common(sub.add_parser("eval", help="evaluate the operator against f"), x=True)
    _add_common(sub.add_parser("quad", help="apply the quadrature rule"))
    _add_common(sub.add_parser("iterate", help="evaluate iterates of the operator"), x=True, r=True)
    _add_common(sub.add_parser("moduli", help="tabulate modulus estimates"))
    v = sub.add_parser("verify", help="run the bound verification suite")
    _add_common(v, fn2=True)
    v.add_argument("--only", action="append", choices=lab_mod.INEQUALITY_IDS,
                   help="restrict to one inequality id (repeatable)")
    _add_common(sub.add_parser("rule-export", help="export the quadrature rule"), fn=False)
    return p


# -- helpers ---------------------------------------------------------------------------

def _params(args, required=True):
    if args.n is None or args.m is None:
        if required:
            raise UsageError("--n and --m are required")
        return None
    try:
        return OperatorParams(args.n, args.m)
    except CompBernError as exc:
        raise UsageError(str(exc)) from None


def _function(label, flag="--fn"):
    if label is None:
        raise UsageError(f"{flag} is required; valid labels: {', '.join(CORPUS_BY_LABEL)}")
    if label not in CORPUS_BY_LABEL:
        raise UsageError(f"unknown function {label!r}; valid labels: {', '.join(CORPUS_BY_LABEL)}")
    return CORPUS_BY_LABEL[label]


def _points(args):
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if getattr(args, "x", None) is not None:
        if not 0.0 <= args.x <= 1.0:
            raise UsageError("--x must lie in [0, 1]")
        return np.array([args.x])
    return np.linspace(0.0, 1.0, args.grid)


def _num(v):
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else ""
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def emit_rows(rows, columns, fmt, fh):
    if fmt == "json":
        for row in rows:
            fh.write(json.dumps({c: _json_value(row[c]) for c in columns}) + "\n")
    elif fmt == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_num(row[c]) for c in columns])
    else:
        fh.write("  ".join(f"{c:>22}" for c in columns) + "\n")
        for row in rows:
            fh.write("  ".join(f"{_num(row[c]):>22}" for c in columns) + "\n")


# -- subcommands ------------------------------------------------------------------------

def cmd_eval(args, fh):
    f = _function(args.fn_label)
    p = _params(args)
    xs = _points(args)
    bf = np.atleast_1d(composite_eval(f, p, xs))
    fx = f(xs)
    mom = np.atleast_1d(second_moment(p, xs))
    mod = Moduli(f, N=args.modgrid)
    rows = [{"x": float(x), "f": float(a), "Bf": float(b), "abs_error": float(abs(b - a)),
             "second_moment": float(s), "paltanea_rhs": 1.5 * mod.omega2(math.sqrt(s))}
            for x, a, b, s in zip(xs, fx, bf, mom)]
    emit_rows(rows, ["x", "f", "Bf", "abs_error", "second_moment", "paltanea_rhs"], args.out_format, fh)
    return EXIT_OK


def cmd_quad(args, fh):
    f = _function(args.fn_label)
    p = _params(args)
    value = apply_rule(build_rule(p), f)
    ref = reference_integral(f, args.tol)
    lab = lab_mod.Lab(args.modgrid, args.tol)
    row = {"n": p.n, "m": p.m, "fn": f.label, "I_nm": value, "reference": ref,
           "abs_error": abs(ref - value),
           "t62_bound": c2_error_bound(p, f) if f.is_c2 else None,
           "t63ii_bound": lab_mod.check_quadrature_omega2(f, p, lab).rhs}
    emit_rows([row], list(row), args.out_format, fh)
    return EXIT_OK


def cmd_iterate(args, fh):
    f = _function(args.fn_label)
    p = _params(args)
    if args.r is None or args.r < 0:
        raise UsageError("--r must be a nonnegative integer")
    xs = _points(args)
    it = np.atleast_1d(iterate_eval(f, p, args.r, xs))
    lin = np.atleast_1d(piecewise_linear_interp(f, p.m, xs))
    rows = [{"x": float(x), "f": float(v), "iterate": float(a), "chord": float(s), "gap": float(abs(a - s))}
            for x, v, a, s in zip(xs, f(xs), it, lin)]
    emit_rows(rows, ["x", "f", "iterate", "chord", "gap"], args.out_format, fh)
    return EXIT_OK


def cmd_moduli(args, fh):
    f = _function(args.fn_label)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    try:
        mod = Moduli(f, N=args.modgrid)
    except CompBernError as exc:
        raise UsageError(str(exc)) from None
    ts = np.linspace(0.0, 1.0, args.grid)
    rows = [{"t": float(t), "omega1": mod.omega1(t), "omega2": mod.omega2(t),
             "omega_tilde": mod.omega_tilde(t)} for t in ts]
    emit_rows(rows, ["t", "omega1", "omega2", "omega_tilde"], args.out_format, fh)
    return EXIT_OK


def cmd_verify(args, fh):
    p = _params(args, required=False)
    if (args.n is None) != (args.m is None):
        raise UsageError("--n and --m must be given together")
    params = lab_mod.DEFAULT_PARAMS if p is None else (p,)
    corpus = list(CORPUS)
    pairs = None
    if args.fn_label is not None:
        f = _function(args.fn_label)
        corpus = [f]
        g = f if args.fn2_label is None else _function(args.fn2_label, "--fn2")
        pairs = [(f, g)]
    elif args.fn2_label is not None:
        raise UsageError("--fn2 needs --fn")
    result = lab_mod.run_suite(params, corpus, only=args.only, pairs=pairs,
                               N=args.modgrid, tol=args.tol)
    if args.out_format == "csv":
        lab_mod.write_csv(result.reports, fh)
    elif args.out_format == "json":
        lab_mod.write_jsonl(result.reports, fh, result.summary)
    else:
        for rep in result.reports:
            fh.write(f"{rep.status:>12}  {rep.inequality_id:<17} {','.join(rep.function_labels):<12} "
                     f"n={_num(rep.params.n if rep.params else None):<2} "
                     f"m={_num(rep.params.m if rep.params else None):<2} "
                     f"r={_num(rep.r):<3} x={_num(rep.x):<6} margin={rep.margin:.3e}\n")
        fh.write(json.dumps(result.summary) + "\n")
    return EXIT_VIOLATION if result.summary["violated"] else EXIT_OK


def cmd_rule_export(args, fh):
    p = _params(args)
    rule = build_rule(p)
    if args.out_format == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "weight"])
        for x, wt in zip(rule.nodes, rule.weights):
            w.writerow([_num(float(x)), _num(float(wt))])
    else:
        fh.write(rule.to_json() + "\n")
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "quad": cmd_quad,
    "iterate": cmd_iterate,
    "moduli": cmd_moduli,
    "verify": cmd_verify,
    "rule-export": cmd_rule_export,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        if args.modgrid < 64:
            raise UsageError("--modgrid must be at least 64")
        if not args.tol >= 1e-14:
            raise UsageError("--tol must be at least 1e-14")
        try:
            out = open(args.out_path, "w", newline="") if args.out_path else contextlib.nullcontext(sys.stdout)
        except OSError as exc:
            print(f"compbern: cannot open output: {exc}", file=sys.stderr)
            return EXIT_IO
        with out as fh:
            try:
                return COMMANDS[args.subcommand](args, fh)
            except CompBernError as exc:
                raise UsageError(str(exc)) from None
    except UsageError as exc:
        print(f"compbern: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"compbern: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
