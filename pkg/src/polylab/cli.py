"""Command line front end.

Subcommands
-----------
synth    build a momentum map from an outline description (JSON in, JSON out)
eval     sample map fields on a rectangular grid, write CSV
check    run a named invariant suite, write a JSON verdict
solve    boundary-value solvers (kernel convolution or separable series)
report   eval plus rendered PNG figures in an output directory

CSV conventions: comma separated, one header row, floats written with
repr-faithful precision, NaN marks points excluded from a field's domain.
Exit codes: 0 ok, 1 a check suite failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import checksuites, gallery, geometry, polytope, solvers

FIELD_NAMES = ("phi1", "phi2", "det", "factor", "gauss", "abreu", "conformal")


def _fmt(v: float) -> str:
    return "%.17g" % v


def _parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 6:
        raise ValueError("grid must be 'x0,x1,nx,y0,y1,ny'")
    x0, x1 = float(parts[0]), float(parts[1])
    nx = int(parts[2])
    y0, y1 = float(parts[3]), float(parts[4])
    ny = int(parts[5])
    if nx < 1 or ny < 1:
        raise ValueError("grid counts must be positive")
    return np.linspace(x0, x1, nx), np.linspace(y0, y1, ny)


def _parse_params(text):
    if not text:
        return None
    out = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"bad parameter {item!r}, expected name=value")
        out[key.strip()] = float(val)
    return out


def _load_map(args) -> polytope.MomentumMap:
    if getattr(args, "map", None):
        return polytope.load_map(args.map)
    if getattr(args, "example", None) is None:
        raise ValueError("this action needs --map or --example")
    entry = gallery.gallery(args.example, params=_parse_params(args.params))
    mp = entry.fields.get("map")
    if mp is None:
        raise ValueError(f"gallery entry {args.example} has no momentum map")
    return mp


def _read_csv(path, ncols: int):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            try:
                vals = [float(c) for c in cells[:ncols]]
            except ValueError:
                continue  # header or comment row
            if len(vals) < ncols:
                raise ValueError(f"{path}: expected {ncols} columns")
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _field_values(mp: polytope.MomentumMap, names, xs, ys):
    """Sample the requested fields; NaN where a field is undefined."""

    def one_point(x: float, y: float):
        out = []
        cache = {}
        for name in names:
            try:
                if name in ("phi1", "phi2"):
                    if "phi" not in cache:
                        cache["phi"] = polytope.eval_map(mp, x, y)
                    out.append(float(cache["phi"][0 if name == "phi1" else 1]))
                elif name == "det":
                    out.append(polytope.eval_jacobian(mp, x, y).det)
                elif name == "factor":
                    jac = polytope.eval_jacobian(mp, x, y)
                    out.append(abs(jac.det) / x if x > 0 else float("nan"))
                elif name == "gauss":
                    out.append(geometry.gauss_curvature(mp, x, y))
                elif name == "abreu":
                    out.append(geometry.abreu_residual(mp, x, y))
                elif name == "conformal":
                    out.append(geometry.conformal_scalar(mp, x, y))
            except (
                geometry.SingularJacobianError,
                geometry.CornerExclusionError,
                ValueError,
                ZeroDivisionError,
            ):
                out.append(float("nan"))
        return out

    def one_column(x: float):
        return [one_point(x, y) for y in ys]

    workers = int(os.environ.get("POLYLAB_THREADS", "1"))
    if workers > 1 and len(xs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(one_column, xs))
    else:
        columns = [one_column(x) for x in xs]
    return columns


def _eval_rows(mp, names, xs, ys):
    columns = _field_values(mp, names, xs, ys)
    rows = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            rows.append([x, y] + columns[i][j])
    return rows


def cmd_synth(args) -> int:
    spec = polytope.load_outline(args.outline)
    vo = polytope.validate_outline(spec)
    mp = polytope.synthesize(vo)
    polytope.save_map(mp, args.out)
    kinks = ",".join(_fmt(y) for y in vo.kink_y) or "-"
    # raw count is one speed per edge plus the two quadratic weights;
    # rescaling the plane and the map together absorbs two of them
    print(
        f"edges={len(spec.speeds)} kinks={kinks} "
        f"params={polytope.parameter_count(vo)} "
        f"params_mod_homothety={polytope.parameter_count(vo) - 2}"
    )
    print(f"wrote {args.out}")
    return 0


def cmd_eval(args) -> int:
    mp = _load_map(args)
    xs, ys = _parse_grid(args.grid)
    names = [n.strip() for n in args.fields.split(",") if n.strip()]
    for name in names:
        if name not in FIELD_NAMES:
            raise ValueError(f"unknown field {name!r}")
    rows = _eval_rows(mp, names, xs, ys)
    _write_csv(args.out, ["x", "y"] + names, rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_check(args) -> int:
    if args.suite == "gallery":
        if args.example is None:
            raise ValueError("--suite gallery requires --example")
        checks = gallery.crosscheck(
            args.example, samples=args.samples, seed=args.seed
        )
        tol = 1e-8 if args.tol is None else args.tol
        report = {
            "suite": f"gallery:{args.example}",
            "checks": checks,
            "pass": all(
                v <= tol or name.endswith("_min") and v >= -tol
                for name, v in checks.items()
            ),
        }
    else:
        mp = None
        if args.suite in checksuites.MAP_SUITES:
            mp = _load_map(args)
        report = checksuites.run_suite(
            args.suite, mp, samples=args.samples, seed=args.seed, tol=args.tol
        )
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["pass"] else 1


def _trace_from_csv(path) -> solvers.BoundaryTrace:
    data = _read_csv(path, 2)
    return solvers.BoundaryTrace(samples=data)


def cmd_solve(args) -> int:
    pts = _read_csv(args.points, 2)
    points = [(row[0], row[1]) for row in pts]
    if args.problem == "halfplane":
        trace = _trace_from_csv(args.trace)
        values = solvers.halfplane_solve(trace, points, tol=args.tol)
    elif args.problem in ("halfplane_eps", "strip_eps"):
        if args.eps is None:
            raise ValueError(f"--eps is required for {args.problem}")
        epsp = args.eps_prime if args.problem == "strip_eps" else None
        spec = solvers.KernelSpec(args.problem, eps=args.eps, eps_prime=epsp)
        trace = _trace_from_csv(args.trace)
        values = solvers.kernel_solve(spec, trace, points, tol=args.tol)
    elif args.problem == "strip":
        if args.eps is None or args.eps_prime is None:
            raise ValueError("strip needs --eps and --eps-prime")
        inner = _trace_from_csv(args.trace)
        outer = _trace_from_csv(args.trace_outer)
        values = solvers.strip_solve(
            args.eps, args.eps_prime, inner, outer, points, tol=args.tol
        )
    elif args.problem == "series":
        right = _trace_from_csv(args.trace)
        top = _trace_from_csv(args.trace_top)
        bottom = _trace_from_csv(args.trace_bottom)
        sol = solvers.series_solve_quad(
            right, top, bottom, n_terms=args.n_terms
        )
        values = [sol(x, y) for x, y in points]
        if args.axis_out:
            ys = np.linspace(-0.9, 0.9, 101)
            axis_rows = [[y, sol.trace_at_zero(y)] for y in ys]
            _write_csv(args.axis_out, ["y", "value"], axis_rows)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown problem {args.problem!r}")
    rows = [[x, y, v] for (x, y), v in zip(points, values)]
    _write_csv(args.out, ["x", "y", "value"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_report(args) -> int:
    from . import plots

    mp = _load_map(args)
    xs, ys = _parse_grid(args.grid)
    names = [n.strip() for n in args.fields.split(",") if n.strip()]
    for name in names:
        if name not in FIELD_NAMES:
            raise ValueError(f"unknown field {name!r}")
    os.makedirs(args.out_dir, exist_ok=True)
    columns = _field_values(mp, names, xs, ys)
    rows = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            rows.append([x, y] + columns[i][j])
    csv_path = os.path.join(args.out_dir, "values.csv")
    _write_csv(csv_path, ["x", "y"] + names, rows)
    grid = np.asarray(columns)  # (nx, ny, nfields)
    written = [csv_path]
    for k, name in enumerate(names):
        png = os.path.join(args.out_dir, f"{name}.png")
        plots.save_field_png(xs, ys, grid[:, :, k], name, png)
        written.append(png)
    trace_png = os.path.join(args.out_dir, "trace.png")
    plots.save_trace_png(mp, trace_png)
    written.append(trace_png)
    for path in written:
        print(f"wrote {path}")
    return 0


def _add_target(sub, required: bool = True) -> None:
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--map", help="momentum map JSON file")
    group.add_argument("--example", type=int, help="gallery entry id (1..8)")
    sub.add_argument("--params", help="entry parameters, e.g. 'M=1,k=0'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polylab", description=__doc__)
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("synth", help="outline JSON to momentum map JSON")
    p.add_argument("--outline", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sp.add_parser("eval", help="sample fields on a grid")
    _add_target(p)
    p.add_argument("--grid", required=True, help="x0,x1,nx,y0,y1,ny")
    p.add_argument("--fields", default="phi1,phi2,det")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sp.add_parser("check", help="run an invariant suite")
    _add_target(p, required=False)
    p.add_argument(
        "--suite",
        required=True,
        choices=list(checksuites.SUITES) + ["gallery"],
    )
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="also write the JSON verdict here")
    p.set_defaults(func=cmd_check)

    p = sp.add_parser("solve", help="boundary value solvers")
    p.add_argument(
        "--problem",
        required=True,
        choices=["halfplane", "halfplane_eps", "strip_eps", "strip", "series"],
    )
    p.add_argument("--trace", required=True, help="CSV of (t, value) samples")
    p.add_argument("--trace-outer", help="outer trace CSV (strip)")
    p.add_argument("--trace-top", help="top trace CSV (series)")
    p.add_argument("--trace-bottom", help="bottom trace CSV (series)")
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-prime", type=float)
    p.add_argument("--n-terms", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--points", required=True, help="CSV of (x, y) points")
    p.add_argument("--out", required=True)
    p.add_argument("--axis-out", help="series only: x=0 trace CSV")
    p.set_defaults(func=cmd_solve)

    p = sp.add_parser("report", help="eval plus PNG figures")
    _add_target(p)
    p.add_argument("--grid", required=True, help="x0,x1,nx,y0,y1,ny")
    p.add_argument("--fields", default="phi1,phi2,det,gauss")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, solvers.TooCloseToSourceError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
