"""Command-line front end.

Subcommands::

    solve         integrate dz/dx + a z^2 = f (linearized, direct or both)
    verify        solve with both methods and run the verification checks
    closed-form   tabulate a closed-form family member
    families-list list the closed-form families and their parameters

Exit codes: 0 success, 1 usage or parse error, 2 a requested check failed
(output is still written), 3 solver abort (a(x) = 0 on the interval, step
size underflow).

CSV columns for ``solve``/``verify``: ``x,z_linearized,z_direct,q,p,flag``;
for ``closed-form``: ``x,z_closed_form,flag``. Numbers are written with 17
significant digits; missing values are empty (CSV) or null (JSON).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .expr import ExprSyntaxError, NotAValue, parse
from .families import FAMILIES, FamilyError, fit_constants, make_family
from .integrate import (
    FLAG_BLOWUP, FLAG_NOT_COMPUTED, FLAG_OK, FLAG_POLE_GUARD, SolveConfig,
    SolverAbort, integrate_direct, output_grid, solve_linearized,
)
from .special import BesselDomainError
from .transform import RiccatiProblem, TransformError
from .verify import cross_method_report, residual_report

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_ABORT = 0, 1, 2, 3

CSV_COLUMNS = ("x", "z_linearized", "z_direct", "q", "p", "flag")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, str):
        return v
    return "%.17g" % v


def _json_num(v):
    if v is None:
        return None
    v = float(v)
    return None if math.isnan(v) else v


def _config_args(p):
    g = p.add_argument_group("solver configuration")
    defaults = SolveConfig()
    for name in ("rel_tol", "abs_tol", "h_init", "h_min", "h_max",
                 "blowup_threshold", "pole_refine_tol", "output_step"):
        g.add_argument("--" + name.replace("_", "-"), type=float,
                       default=getattr(defaults, name), dest=name)


def _output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None, help="output path (default: stdout)")


def _problem_args(p):
    p.add_argument("--a", required=True, help="expression for a(x)")
    p.add_argument("--f", required=True, help="expression for f(x)")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--x-end", type=float, required=True, dest="x_end")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riccati-lin", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve an initial value problem")
    _problem_args(p)
    p.add_argument("--method", choices=("linearized", "direct", "both"), default="both")
    p.add_argument("--check", action="store_true",
                   help="run residual (and cross-method) checks; exit 2 on failure")
    _config_args(p)
    _output_args(p)

    p = sub.add_parser("verify", help="solve with both methods and verify")
    _problem_args(p)
    p.add_argument("--residual-tol", type=float, default=1e-6)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--pole-tol", type=float, default=1e-3)
    _config_args(p)
    _output_args(p)

    p = sub.add_parser("closed-form", help="tabulate a closed-form family member")
    p.add_argument("--family", required=True, choices=tuple(FAMILIES))
    p.add_argument("--c", type=float)
    p.add_argument("--n", type=float)
    p.add_argument("--k", type=float, help="K for note_f_zero")
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--z0", type=float, help="fit the constants so that z(x0) = z0")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--x-end", type=float, required=True, dest="x_end")
    p.add_argument("--output-step", type=float, default=SolveConfig().output_step)
    _output_args(p)

    p = sub.add_parser("families-list", help="list closed-form families")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o", default=None)
    return parser


def _parse_expr(flag, text):
    try:
        return parse(text)
    except ExprSyntaxError as exc:
        caret = " " * exc.offset + "^"
        raise UsageError(f"{flag}: {exc.message} at offset {exc.offset}\n  {text}\n  {caret}")


def _config(ns):
    try:
        return SolveConfig(ns.rel_tol, ns.abs_tol, ns.h_init, ns.h_min, ns.h_max,
                           ns.blowup_threshold, ns.pole_refine_tol, ns.output_step)
    except ValueError as exc:
        raise UsageError(f"solver configuration: {exc}")


def _notice(msg):
    print(f"notice: {msg}", file=sys.stderr)


def _rows(lin, direct, x0, x_end, cfg):
    grid = output_grid(x0, x_end, cfg.output_step)
    grid = np.sort(grid)
    rows = []
    for i, x in enumerate(grid):
        zl = zd = q = p = None
        flag = FLAG_OK
        if lin is not None:
            q, p = float(lin.q[i]), float(lin.p[i])
            if lin.flags[i] == FLAG_OK:
                zl = float(lin.z[i])
            else:
                flag = lin.flags[i]
        if direct is not None:
            if direct.flags[i] == FLAG_OK:
                zd = float(direct.z[i])
            elif flag == FLAG_OK:
                flag = FLAG_BLOWUP if direct.flags[i] == FLAG_BLOWUP else FLAG_NOT_COMPUTED
        rows.append({"x": float(x), "z_linearized": zl, "z_direct": zd, "q": q, "p": p,
                     "flag": flag})
    return rows


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _json(spec, rows, poles, events, report):
    traj = [{k: (_json_num(v) if k != "flag" else v) for k, v in r.items()} for r in rows]
    doc = {
        "spec": spec,
        "trajectory": traj,
        "poles": [float(x) for x in poles],
        "events": [{"kind": e.kind, "x": float(e.x), "message": e.message} for e in events],
        "verification": None if report is None else _clean(report.to_dict()),
        "version": __version__,
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return None if not math.isfinite(obj) else obj
    return obj


def _spec_dict(ns):
    return {k: v for k, v in vars(ns).items() if k not in ("output",)}


def _solve(ns, verify_mode):
    a = _parse_expr("--a", ns.a)
    f = _parse_expr("--f", ns.f)
    if ns.x_end == ns.x0:
        raise UsageError("--x-end must differ from --x0")
    cfg = _config(ns)
    prob = RiccatiProblem(a, f)
    method = "both" if verify_mode else ns.method

    lin = direct = None
    if method in ("linearized", "both"):
        lin = solve_linearized(prob, ns.x0, ns.z0, ns.x_end, cfg)
        for e in lin.events:
            if e.kind == "routed_f_zero":
                _notice(e.message)
    if method in ("direct", "both"):
        direct = integrate_direct(prob, ns.x0, ns.z0, ns.x_end, cfg)

    report = None
    if verify_mode or ns.check:
        primary = lin if lin is not None else direct
        report = residual_report(prob, primary,
                                 tol=getattr(ns, "residual_tol", 1e-6))
        if lin is not None and direct is not None:
            report = report.merged(cross_method_report(
                prob, ns.x0, ns.z0, ns.x_end, cfg, tol=getattr(ns, "gap_tol", 1e-6),
                pole_tol=getattr(ns, "pole_tol", 1e-3), lin=lin, direct=direct))

    rows = _rows(lin, direct, ns.x0, ns.x_end, cfg)
    poles = lin.poles if lin is not None else ()
    events = (lin.events if lin is not None else ()) + (direct.events if direct is not None else ())
    if ns.format == "csv":
        text = _csv(rows, CSV_COLUMNS)
    else:
        text = _json(_spec_dict(ns), rows, poles, events, report)
    _emit(text, ns.output)
    if report is not None and not report.ok:
        failed = [k for k, v in report.passes.items() if not v]
        print(f"check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _closed_form(ns):
    try:
        form = make_family(ns.family, c=ns.c, n=ns.n, k=ns.k, k1=ns.k1, k2=ns.k2)
        if ns.z0 is not None:
            form = fit_constants(form, ns.x0, ns.z0)
    except FamilyError as exc:
        raise UsageError(f"--family {ns.family}: {exc}")
    if ns.x_end == ns.x0:
        raise UsageError("--x-end must differ from --x0")
    if not ns.output_step > 0:
        raise UsageError("--output-step must be positive")
    rows = []
    for x in np.sort(output_grid(ns.x0, ns.x_end, ns.output_step)):
        try:
            z = form(float(x))
        except (FamilyError, BesselDomainError) as exc:
            raise UsageError(f"--x0/--x-end: {exc}")
        if isinstance(z, NotAValue):
            rows.append({"x": float(x), "z_closed_form": None, "flag": FLAG_POLE_GUARD})
        else:
            rows.append({"x": float(x), "z_closed_form": float(z), "flag": FLAG_OK})
    if ns.format == "csv":
        text = _csv(rows, ("x", "z_closed_form", "flag"))
    else:
        spec = _spec_dict(ns)
        spec["constants"] = list(form.constants)
        text = _json(spec, rows, (), (), None)
    _emit(text, ns.output)
    return EXIT_OK


def _families_list(ns):
    if ns.format == "json":
        text = json.dumps({k: list(v) for k, v in FAMILIES.items()}, indent=2) + "\n"
    else:
        text = "".join(f"{k}: {', '.join(v)}\n" for k, v in FAMILIES.items())
    _emit(text, ns.output)
    return EXIT_OK


def run(argv=None) -> int:
    """Run one CLI invocation and return its exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command == "solve":
            return _solve(ns, verify_mode=False)
        if ns.command == "verify":
            return _solve(ns, verify_mode=True)
        if ns.command == "closed-form":
            return _closed_form(ns)
        return _families_list(ns)
    except UsageError as exc:
        print(f"riccati-lin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverAbort, TransformError) as exc:
        print(f"riccati-lin: solver aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
