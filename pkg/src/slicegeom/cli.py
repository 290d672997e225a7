"""Command-line front end.

Subcommands: ``sample``, ``audit``, ``certify``, ``log``, ``root``,
``transition`` and ``verify-paper``.  Exit codes: 0 pass, 1 verdict
fail, 2 usage or configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .algebra import HyperNum, ImaginaryUnit, SlicePoint, complete_basis, decompose, exp, inv
from .differential import DEGENERATE, FAIL, conformality_audit
from .errors import ConfigurationError, ParameterError, ParseError, SliceGeomError
from .expr import stem_from_expr
from .logroot import principal_log, principal_nthroot, slice_power
from .manifolds import ManifoldChart, certify_chart, chart_from_stem, get_chart, sphere_chart_inverse
from .sampling import random_hypernum_coeffs, rng_for

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


# -- helpers ------------------------------------------------------------------

def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        nx, ny = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 20x10, got {text!r}")
    if nx < 1 or ny < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return nx, ny


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def resolve_chart(args) -> ManifoldChart:
    if args.expr is not None:
        stem = stem_from_expr(args.expr)
        return chart_from_stem(stem, args.dim)
    name = args.chart
    if name in ("sphere", "sphere-north", "sphere-south") and getattr(args, "pole", None):
        name = f"sphere-{args.pole}"
    return get_chart(name, args.dim, theta=getattr(args, "theta", None), n=getattr(args, "n", None))


def chart_points(chart: ManifoldChart, points: int, seed, grid=None) -> list[SlicePoint]:
    if grid is not None:
        return chart.grid_points(seed, *grid)
    return chart.sample_points(seed, points)


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


# -- sample -------------------------------------------------------------------

def sample_records(chart: ManifoldChart, pts, with_jacobian: bool) -> list[dict]:
    records = []
    for p in pts:
        rec = {
            "x": p.x,
            "y": p.y,
            "unit": p.unit.coeffs[1:].tolist(),
            "value": chart(p).tolist(),
        }
        if with_jacobian:
            rec["jacobian"] = chart.jacobian(p).matrix.tolist()
        records.append(rec)
    return records


def records_to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    first = records[0] if records else {"x": 0, "y": 0, "unit": [], "value": []}
    header = ["x", "y"]
    header += [f"unit_{k + 1}" for k in range(len(first["unit"]))]
    header += [f"value_{k}" for k in range(len(first["value"]))]
    if "jacobian" in first:
        J = first["jacobian"]
        header += [f"jacobian_{r}_{c}" for r in range(len(J)) for c in range(len(J[0]))]
    writer.writerow(header)
    for rec in records:
        row = [repr(rec["x"]), repr(rec["y"])]
        row += [repr(v) for v in rec["unit"]]
        row += [repr(v) for v in rec["value"]]
        if "jacobian" in rec:
            row += [repr(v) for r in rec["jacobian"] for v in r]
        writer.writerow(row)
    return buf.getvalue()


def cmd_sample(args) -> int:
    chart = resolve_chart(args)
    pts = chart_points(chart, args.points, args.seed, args.grid)
    records = sample_records(chart, pts, args.jacobian)
    if args.format == "csv":
        _write(records_to_csv(records), args.out)
    else:
        _write(_dump_json({"chart": chart.name, "dim": chart.dim, "seed": args.seed, "samples": records}), args.out)
    return EXIT_PASS


# -- audit --------------------------------------------------------------------

def _immersion_ok(J: np.ndarray, tol: float) -> bool:
    s = np.linalg.svd(J, compute_uv=False)
    return bool(s[-1] > tol * s[0])


def run_audit(chart: ManifoldChart, *, points: int = 1000, seed=0, tol: float = 1e-9, grid=None, expect=None):
    """Audit ``chart`` at sample points; returns ``(exit_code, report)``.

    The exit code is 0 iff no point fails its expected class.  Degenerate
    blocks are counted separately and do not fail the audit.
    """
    expect = expect or chart.expected_class
    if expect not in ("slice", "full", "immersion"):
        raise ConfigurationError(f"unknown conformality class {expect!r}")
    pts = chart_points(chart, points, seed, grid)
    counts = {name: {"pass": 0, "fail": 0, "degenerate": 0} for name in ("slice_block", "perp_block", "full")}
    worst = {"slice_block": 0.0, "perp_block": 0.0, "full": 0.0}
    failures, first_failure, degenerate = 0, None, 0
    for p in pts:
        J = chart.jacobian(p, complete_basis(p.unit)).matrix
        rep = conformality_audit(J, tol)
        for name in counts:
            block = getattr(rep, name)
            counts[name][block.verdict] += 1
            if block.verdict != DEGENERATE:
                worst[name] = max(worst[name], block.residual)
        if expect == "immersion":
            ok = _immersion_ok(J, tol)
        else:
            blocks = (rep.full,) if expect == "full" else (rep.slice_block, rep.perp_block)
            ok = not any(b.verdict == FAIL for b in blocks)
            degenerate += any(b.verdict == DEGENERATE for b in blocks)
        if not ok:
            failures += 1
            if first_failure is None:
                first_failure = {"x": p.x, "y": p.y, "unit": p.unit.coeffs[1:].tolist(), "report": rep.to_dict()}
    report = {
        "chart": chart.name,
        "dim": chart.dim,
        "seed": seed,
        "tol": tol,
        "expected_class": expect,
        "points": len(pts),
        "verdict": "pass" if failures == 0 else "fail",
        "failing_points": failures,
        "degenerate_points": degenerate,
        "block_counts": counts,
        "worst_residual": worst,
        "failing_blocks": sorted({n.replace("_block", "") for n, c in counts.items() if c["fail"]}),
        "first_failure": first_failure,
    }
    return (EXIT_PASS if failures == 0 else EXIT_FAIL), report


def cmd_audit(args) -> int:
    chart = resolve_chart(args)
    code, report = run_audit(chart, points=args.points, seed=args.seed, tol=args.tol, grid=args.grid, expect=args.expect)
    _write(_dump_json(report), args.out)
    return code


# -- certify ------------------------------------------------------------------

def cmd_certify(args) -> int:
    chart = resolve_chart(args)
    cert = certify_chart(chart, args.tol, samples=args.points, seed=args.seed)
    out = cert.to_dict()
    out["chart"] = chart.name
    out["dim"] = chart.dim
    _write(_dump_json(out), args.out)
    return EXIT_PASS if cert.passed else EXIT_FAIL


# -- log / root ---------------------------------------------------------------

def read_points(stream, dim: int) -> list[HyperNum]:
    """One point per line: ``dim`` numbers separated by spaces or commas; ``#`` starts a comment."""
    pts = []
    for lineno, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            values = [float(v) for v in line.split()]
        except ValueError:
            raise ConfigurationError(f"line {lineno}: not a list of numbers")
        if len(values) != dim:
            raise ConfigurationError(f"line {lineno}: expected {dim} coefficients, got {len(values)}")
        pts.append(HyperNum(values))
    return pts


def _negative_unit(args):
    if args.negative_unit is None:
        return None
    values = [float(v) for v in args.negative_unit.replace(",", " ").split()]
    if len(values) != args.dim - 1:
        raise ConfigurationError(f"--negative-unit needs {args.dim - 1} imaginary coefficients")
    return ImaginaryUnit([0.0] + values)


def _branch_rows(pts, func, check):
    rows, errors = [], 0
    for q in pts:
        try:
            w = func(q)
            rows.append({"q": q.coeffs.tolist(), "value": w.coeffs.tolist(), "residual": check(q, w)})
        except SliceGeomError as exc:
            errors += 1
            rows.append({"q": q.coeffs.tolist(), "error": f"{type(exc).__name__}: {exc}"})
    return rows, errors


def _emit_rows(args, kind: str, rows: list[dict]):
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        dim = args.dim
        writer.writerow([f"q_{k}" for k in range(dim)] + [f"{kind}_{k}" for k in range(dim)] + ["residual", "error"])
        for r in rows:
            value = r.get("value", [""] * dim)
            writer.writerow(
                [repr(v) for v in r["q"]] + [repr(v) if v != "" else "" for v in value]
                + [repr(r["residual"]) if "residual" in r else "", r.get("error", "")]
            )
        _write(buf.getvalue(), args.out)
    else:
        _write(_dump_json({"function": kind, "dim": args.dim, "results": rows}), args.out)


def cmd_log(args) -> int:
    pts = read_points(sys.stdin, args.dim)
    unit = _negative_unit(args)
    rows, errors = _branch_rows(
        pts,
        lambda q: principal_log(q, unit),
        lambda q, w: (exp(w) - q).norm() / q.norm(),
    )
    _emit_rows(args, "log", rows)
    return EXIT_RUNTIME if errors else EXIT_PASS


def cmd_root(args) -> int:
    pts = read_points(sys.stdin, args.dim)
    unit = _negative_unit(args)
    n = args.n if args.n is not None else 2
    rows, errors = _branch_rows(
        pts,
        lambda q: principal_nthroot(n, q, unit),
        lambda q, w: (slice_power(w, n) - q).norm() / max(q.norm(), 1e-300),
    )
    _emit_rows(args, f"root{n}", rows)
    return EXIT_RUNTIME if errors else EXIT_PASS


# -- transition ---------------------------------------------------------------

def run_transition(dim: int, points: int, seed, tol: float):
    """Check ``(south^-1 o north)(q) q = 1`` at random ``q``."""
    chart = get_chart("sphere-north", dim)
    rng = rng_for(seed)
    worst = 0.0
    for c in random_hypernum_coeffs(rng, dim, points):
        q = HyperNum(c)
        w = sphere_chart_inverse("south", chart(decompose(q)))
        worst = max(worst, (w * q - 1.0).norm(), (w - inv(q)).norm() / inv(q).norm())
    report = {"chart": "sphere", "dim": dim, "seed": seed, "points": points, "tol": tol,
              "max_residual": worst, "verdict": "pass" if worst <= tol else "fail"}
    return (EXIT_PASS if worst <= tol else EXIT_FAIL), report


def cmd_transition(args) -> int:
    if args.chart not in ("sphere", "sphere-north", "sphere-south"):
        raise ConfigurationError(f"transition maps are only available for the sphere atlas, not {args.chart!r}")
    tol = 1e-11 if args.tol is None else args.tol
    code, report = run_transition(args.dim, args.points, args.seed, tol)
    _write(_dump_json(report), args.out)
    return code


# -- verify-paper -------------------------------------------------------------

def _parse_criteria(text: str | None):
    if text is None:
        return None
    out = set()
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.update(range(int(a), int(b) + 1))
        elif part.strip():
            out.add(int(part))
    return sorted(out)


def cmd_verify(args) -> int:
    from .verify import CRITERIA, determinism, render, run_battery

    numbers = _parse_criteria(args.criteria)
    if numbers is not None and any(k not in CRITERIA and k != 11 for k in numbers):
        raise ConfigurationError(f"criteria must be between 1 and 11, got {args.criteria}")
    battery = None if numbers is None else [k for k in numbers if k != 11]
    results = run_battery(args.seed, battery)
    if not args.no_rerun and (numbers is None or 11 in numbers):
        results.append(determinism(args.seed, battery, reference=results))
    text = render(results)
    if args.format == "json":
        report = _dump_json({"seed": args.seed, "criteria": [r.to_dict() for r in results]})
    else:
        report = text
    if args.out is not None:
        _write(report, args.out)
    sys.stdout.write(text)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


# -- argument parsing ---------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *, chart=True, points=1000, fmt=True):
    if chart:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--chart", default="helicoid", help="catalog chart name or graph:<expr>")
        src.add_argument("--expr", default=None, help="stem expression, e.g. '(sinh(x)*cos(y) + iota*sinh(x)*sin(y), iota*y)'")
        p.add_argument("--theta", type=float, default=None, help="deformation parameter in [0, pi/2]")
        p.add_argument("--pole", choices=("north", "south"), default=None)
    p.add_argument("--dim", type=int, choices=(4, 8), default=4)
    p.add_argument("--points", type=_positive_int, default=points)
    p.add_argument("--grid", type=_parse_grid, default=None, metavar="AxB")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--n", type=int, default=None, help="root order for nroot / root")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicegeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a chart and export points, values and Jacobians")
    _add_common(p, points=100)
    p.add_argument("--jacobian", action="store_true", help="include the analytic Jacobian of each sample")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("audit", help="conformality audit of a chart")
    _add_common(p, fmt=False)
    p.add_argument("--expect", choices=("slice", "full", "immersion"), default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("certify", help="check the slice-conformal curve theorem hypotheses")
    _add_common(p, points=256, fmt=False)
    p.set_defaults(func=cmd_certify)

    for name, func, text in (("log", cmd_log, "principal logarithm"), ("root", cmd_root, "principal n-th root")):
        p = sub.add_parser(name, help=f"{text} of points read from stdin")
        p.add_argument("--dim", type=int, choices=(4, 8), default=4)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)
        p.add_argument("--negative-unit", default=None, help="imaginary coefficients of the unit used on negative reals")
        if name == "root":
            p.add_argument("--n", type=int, default=2)
        p.set_defaults(func=func)

    p = sub.add_parser("transition", help="verify the sphere atlas transition map")
    p.add_argument("--chart", default="sphere")
    p.add_argument("--dim", type=int, choices=(4, 8), default=4)
    p.add_argument("--points", type=_positive_int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("verify-paper", help="run the acceptance battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--criteria", default=None, help="subset such as 1,3-5 (default: all)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None, help="report file")
    p.add_argument("--no-rerun", action="store_true", help="skip the determinism rerun (criterion 11)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ParameterError, ParseError) as exc:
        print(f"slicegeom: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SliceGeomError, OSError, ValueError, ArithmeticError) as exc:
        print(f"slicegeom: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
