"""``dfcalc`` command line: apply operators, run the identity and by-parts checks, solve variational problems.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
I/O or parse errors. Errors are reported as a single ``dfcalc: <kind>: <reason>``
line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .byparts import SBP_FORMS, SBP_IDS, sbp
from .grid import DomainError, Grid, GridFunction, read_csv, write_csv
from .identities import DEFAULT_ALPHAS, FLOAT_TOL, IDENTITY_IDS, default_grids, reports_to_json, run_suite
from .kernels import PoleError
from .operators import OPERATOR_NAMES, OperatorSpec, apply
from .scalars import Backend, format_scalar, parse_scalar
from .variational import (
    ConvergenceError,
    SingularSystemError,
    boundary_report,
    brute_force_minimize,
    el_residual,
    functional_value,
    load_problem,
    solve_quadratic,
)

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = EXIT_ERROR):
        super().__init__(message)
        self.kind = kind
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _scalar(text: str, backend: Backend, what: str):
    try:
        return parse_scalar(text, backend)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError("parse", f"{what} {text!r} is not a valid {backend.value} scalar ({exc})") from None


def _alphas(values, backend):
    out = []
    for item in values:
        out.extend(_scalar(tok, backend, "alpha") for tok in item.split(",") if tok.strip())
    return out


def _read(path: str, backend: Backend) -> GridFunction:
    try:
        return read_csv(path, backend)
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror or exc}") from None
    except (ValueError, DomainError) as exc:
        raise CliError("parse", f"{path}: {exc}") from None


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc.strerror or exc}") from None


# -- subcommands --------------------------------------------------------------


def cmd_apply(args) -> int:
    backend = Backend.of(args.backend)
    f = _read(args.input, backend)
    alpha = _scalar(args.alpha, backend, "alpha")
    spec_probe = OperatorSpec.parse(args.op, alpha)
    anchor_text = args.a if spec_probe.side == "left" else args.b
    anchor = None if anchor_text is None else _scalar(anchor_text, backend, "anchor")
    try:
        out = apply(OperatorSpec.parse(args.op, alpha, anchor), f)
    except (DomainError, ValueError, ArithmeticError) as exc:
        raise CliError("domain", str(exc)) from None
    _emit(write_csv(out), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    backend = Backend.of(args.backend)
    alphas = _alphas(args.alpha, backend) if args.alpha else [parse_scalar(format_scalar(a), backend) for a in DEFAULT_ALPHAS]
    a = _scalar(args.a, backend, "a")
    if args.b is not None:
        b = _scalar(args.b, backend, "b")
        try:
            grids = [Grid.span(a, b)]
        except DomainError as exc:
            raise CliError("parse", str(exc)) from None
    else:
        grids = default_grids(backend, a)
    identities = args.identity or list(IDENTITY_IDS)
    unknown = [i for i in identities if i not in IDENTITY_IDS]
    if unknown:
        raise CliError("usage", f"unknown identity {unknown[0]}; choose from {', '.join(IDENTITY_IDS)}")
    tol = FLOAT_TOL if args.tolerance is None else args.tolerance
    reports = run_suite(None, alphas, grids, identities=identities, backend=backend, tol=tol, p=args.p, n=args.n)
    _emit(reports_to_json(reports), args.output)
    failed = [r for r in reports if not r.passed]
    if failed:
        first = failed[0]
        why = first.error or f"max_dev={format_scalar(first.max_abs_deviation)}"
        print(
            f"dfcalc: check: {len(failed)} of {len(reports)} identity checks failed "
            f"(first: {first.identity_id} alpha={format_scalar(first.alpha)} {first.function}: {why})",
            file=sys.stderr,
        )
        return EXIT_FAIL
    return EXIT_OK


def cmd_sbp(args) -> int:
    backend = Backend.of(args.backend)
    f = _read(args.f, backend)
    g = _read(args.g, backend)
    alpha = _scalar(args.alpha, backend, "alpha")
    theorems = args.theorem or list(SBP_IDS)
    reports = []
    try:
        for th in theorems:
            reports.append(sbp(th, f, g, alpha, form=args.form))
    except (DomainError, ValueError, TypeError) as exc:
        raise CliError("domain", str(exc)) from None
    _emit(json.dumps([r.to_json() for r in reports], indent=2), args.output)
    failed = [r for r in reports if not r.passed]
    if failed:
        names = ", ".join(f"{r.theorem_id} (deviation {format_scalar(r.deviation)})" for r in failed)
        print(f"dfcalc: check: summation by parts failed for {names}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_el_solve(args) -> int:
    backend = Backend.of(args.backend) if args.backend else None
    try:
        problem = load_problem(args.problem, backend)
    except OSError as exc:
        raise CliError("io", f"cannot read {args.problem}: {exc.strerror or exc}") from None
    except (ValueError, KeyError, TypeError, DomainError) as exc:
        raise CliError("parse", f"{args.problem}: {exc}") from None
    try:
        if args.method == "descent":
            f = brute_force_minimize(problem, iters=args.iters)
        else:
            f = solve_quadratic(problem)
    except (SingularSystemError, ConvergenceError) as exc:
        print(f"dfcalc: check: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except TypeError as exc:
        raise CliError("usage", str(exc)) from None
    residual = el_residual(problem, f)
    worst = max(abs(v) for v in residual.values)
    tol = args.tolerance if args.tolerance is not None else (0 if problem.backend is Backend.EXACT else 1e-8)
    passed = worst <= tol
    report = {
        "variant": problem.variant,
        "alpha": format_scalar(problem.alpha),
        "a": format_scalar(problem.a),
        "b": format_scalar(problem.b),
        "boundary": problem.boundary.kind,
        "method": args.method,
        "functional": format_scalar(functional_value(problem, f)),
        "residual_grid": {"base": format_scalar(residual.grid.base), "count": residual.grid.count},
        "residual": [format_scalar(v) for v in residual.values],
        "max_residual": format_scalar(worst),
        "boundary_values": _jsonable(boundary_report(problem, f)),
        "pass": bool(passed),
    }
    _emit(write_csv(f), args.output)
    _emit(json.dumps(report, indent=2), args.report)
    if not passed:
        print(f"dfcalc: check: Euler-Lagrange residual {format_scalar(worst)} exceeds {tol}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, str):
        return obj
    return format_scalar(obj)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dfcalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def backend_flag(p, default="exact"):
        p.add_argument("--backend", choices=["exact", "float"], default=default,
                       help="exact rationals (alpha must be rational) or floats (default: %(default)s)")

    p = sub.add_parser("apply", help="apply one operator to a t,value CSV",
                       description="Operators: " + ", ".join(OPERATOR_NAMES))
    p.add_argument("--op", required=True, choices=OPERATOR_NAMES, metavar="NAME",
                   help="{delta|nabla}-{left|right}-{sum|rl|caputo}")
    p.add_argument("--alpha", required=True, help="order as p/q or a decimal")
    p.add_argument("--a", help="left anchor (default: first grid point; a+n-1 for nabla-left-caputo)")
    p.add_argument("--b", help="right anchor (default: last grid point; b-n+1 for nabla-right-caputo)")
    p.add_argument("--input", "-i", required=True, help="input CSV with header t,value")
    p.add_argument("--output", "-o", help="output CSV (default: stdout)")
    backend_flag(p)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("verify", help="run the identity suite and write a JSON report")
    p.add_argument("--alpha", action="append", help="order(s), repeatable or comma separated (default: the standard sweep)")
    p.add_argument("--a", default="0", help="window start (default: %(default)s)")
    p.add_argument("--b", help="window end (default: windows of width 4, 8 and 16)")
    p.add_argument("--identity", action="append", help="restrict to these identity IDs (repeatable)")
    p.add_argument("--p", type=int, default=2, help="difference order for COMM_LNG/COMM_RNG (default: %(default)s)")
    p.add_argument("--n", type=int, default=2, help="difference order for INT_DUAL_N (default: %(default)s)")
    p.add_argument("--tolerance", type=float, help=f"float backend scaled tolerance (default: {FLOAT_TOL})")
    p.add_argument("--output", "-o", help="JSON report path (default: stdout)")
    backend_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sbp", help="evaluate the summation-by-parts formulas on f and g")
    p.add_argument("--f", required=True, help="CSV for f")
    p.add_argument("--g", required=True, help="CSV for g (same window as f)")
    p.add_argument("--alpha", required=True, help="order in (0, 1)")
    p.add_argument("--theorem", action="append", choices=SBP_IDS, help="restrict to these formulas (repeatable)")
    p.add_argument("--form", choices=[f for f in SBP_FORMS if f != "proof"], default="stated",
                   help="stated formulas or the repaired right-hand variants (default: %(default)s)")
    p.add_argument("--output", "-o", help="JSON report path (default: stdout)")
    backend_flag(p)
    p.set_defaults(func=cmd_sbp)

    p = sub.add_parser("el-solve", help="solve a variational problem described in JSON")
    p.add_argument("--problem", required=True, help="problem JSON")
    p.add_argument("--method", choices=["solve", "descent"], default="solve",
                   help="direct linear solve (quadratic Lagrangians) or gradient descent (float)")
    p.add_argument("--iters", type=int, default=10_000, help="descent iteration cap")
    p.add_argument("--tolerance", type=float, help="residual tolerance (default: 0 exact, 1e-8 float)")
    p.add_argument("--output", "-o", help="solution CSV (default: stdout)")
    p.add_argument("--report", help="residual report JSON (default: stdout)")
    p.add_argument("--backend", choices=["exact", "float"], help="override the backend named in the problem file")
    p.set_defaults(func=cmd_el_solve)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"dfcalc: {exc.kind}: {exc}", file=sys.stderr)
        return exc.code
    except PoleError as exc:
        print(f"dfcalc: domain: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
