"""Command line front end.

Subcommands
-----------
solve       one worst-case solve, JSON object or one CSV row
sweep       worst-case means over a grid of radii (CSV)
cdf         nominal and worst-case CDF on an energy grid (CSV)
knownclass  known-class boundary parameters over a grid of radii (CSV)
check       closed-form means against the grid oracle (CSV)
figures     data series behind the four published figures (CSV files)

Exit status is 0 on success, 1 when ``check`` finds a gap outside the
band, 2 for invalid input, 3 when a solver fails to converge and 4 when
the requested quantity sits at infinite divergence.  Floats are written
with ``%.12g`` and CSV uses LF line endings, so identical invocations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import knownclass, oracle
from .exceptions import ConvergenceError, DomainError, InfiniteDivergenceError, RobustWPTError
from .nominal import Exponential, parse_nominal
from .worstcase import Divergence, ReverseMode, UncertaintySet, solve, worst_cdf

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INFINITE = 4

FLOAT_FORMAT = "%.12g"
DEFAULT_CHECK_RADII = (0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0)
FIGURE_CDF_RADII = (0.05, 0.1, 0.5)
FIGURE_SWEEP_GRID = "0:3:0.05"
FIGURE_X_GRID = "0:5:0.02"
MAX_GRID_POINTS = 1_000_000
KINDS = tuple(k.value for k in Divergence)
MODES = tuple(m.value for m in ReverseMode)


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; keep that but route through main
    def error(self, message):
        raise DomainError(message)


# ---------------------------------------------------------------------------
# formatting


def fmt(value) -> str:
    """Render a cell: ``%.12g`` for floats, '' for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def _open_output(path: Optional[str]):
    if path is None or path == "-":
        return _Stdout()
    return open(path, "w", encoding="utf-8", newline="")


class _Stdout(io.StringIO):
    def __exit__(self, exc_type, *rest):
        if exc_type is None:
            sys.stdout.write(self.getvalue())
            sys.stdout.flush()
        return super().__exit__(exc_type, *rest)


# ---------------------------------------------------------------------------
# grids


def _round(v: float) -> float:
    # the value that will be printed is the value that gets solved
    return float(FLOAT_FORMAT % v)


def parse_grid(text: str, name: str = "grid") -> List[float]:
    """Parse ``start:stop:step`` (stop included) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise DomainError(f"{name} range must be start:stop:step")
            start, stop, step = parts
            if not step > 0 or stop < start:
                raise DomainError(f"{name} range needs step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            if count > MAX_GRID_POINTS:
                raise DomainError(f"{name} has more than {MAX_GRID_POINTS} points")
            values = [_round(start + i * step) for i in range(count)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise DomainError(f"cannot parse {name} {text!r}") from None
    if not values:
        raise DomainError(f"{name} is empty")
    if not all(math.isfinite(v) and v >= 0 for v in values):
        raise DomainError(f"{name} entries must be finite and nonnegative")
    return values


def _default_x_grid(nominal) -> List[float]:
    lo, hi = nominal.support
    top = hi if math.isfinite(hi) else nominal.quantile(0.999)
    return [_round(v) for v in np.linspace(lo, top, 201)]


# ---------------------------------------------------------------------------
# subcommands


def _nominal(args):
    # parsed once per invocation; tables are not re-read for every sweep row
    if getattr(args, "_model", None) is None:
        args._model = parse_nominal(args.nominal)
    return args._model


def _uset(args, d):
    return UncertaintySet(_nominal(args), args.kind, d)


def _solve(args, d):
    return solve(_uset(args, d), mode=args.mode, path=args.path, tol=args.tol)


SOLVE_FIELDS = ("kind", "d", "mean", "mu_star", "s_star", "normalization_residual",
                "divergence_residual", "iterations", "mode")


def _report(sol) -> dict:
    diag = sol.diagnostics
    return {"kind": sol.kind.value, "d": sol.d, "mean": sol.mean, "mu_star": sol.mu_star,
            "s_star": sol.s_star, "normalization_residual": diag.normalization_residual,
            "divergence_residual": diag.divergence_residual, "iterations": diag.iterations,
            "mode": diag.mode}


def cmd_solve(args) -> int:
    report = _report(_solve(args, args.d))
    with _open_output(args.output) as out:
        if args.format == "json":
            out.write(json.dumps({k: _json_value(report[k]) for k in SOLVE_FIELDS}) + "\n")
        else:
            write_csv(SOLVE_FIELDS, [[report[k] for k in SOLVE_FIELDS]], out)
    return EXIT_OK


SWEEP_FIELDS = ("d", "mean", "mu_star", "s_star", "iterations", "divergence_residual", "error")


def _sweep_row(args, d):
    try:
        sol = _solve(args, d)
    except (ConvergenceError, InfiniteDivergenceError) as exc:
        return [d, None, None, None, None, None, f"{type(exc).__name__}: {exc}"]
    diag = sol.diagnostics
    return [d, sol.mean, sol.mu_star, sol.s_star, diag.iterations, diag.divergence_residual, ""]


def cmd_sweep(args) -> int:
    ds = parse_grid(args.d_grid, "d-grid")
    _uset(args, 0.0)  # validate the nominal and kind before spawning work
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(lambda d: _sweep_row(args, d), ds))
    with _open_output(args.output) as out:
        write_csv(SWEEP_FIELDS, rows, out)
    if all(row[-1] for row in rows):
        print("error: every point of the sweep failed", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_cdf(args) -> int:
    nominal = _nominal(args)
    xs = parse_grid(args.x_grid, "x-grid") if args.x_grid else _default_x_grid(nominal)
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("x-grid must be strictly ascending")
    sol = _solve(args, args.d)
    F0 = np.asarray(nominal.cdf(np.array(xs)), dtype=float)
    F = np.asarray(worst_cdf(sol, np.array(xs)), dtype=float)
    with _open_output(args.output) as out:
        write_csv(("x", "F_nominal", "F_worst"), zip(xs, F0, F), out)
    return EXIT_OK


def cmd_knownclass(args) -> int:
    ds = parse_grid(args.d_grid, "d-grid")
    if args.family == "exp":
        lam0 = args.lambda0
        rows = []
        for d in ds:
            exact = knownclass.exp_class_forward(lam0, d).boundary_parameter
            paper = knownclass.exp_class_forward(lam0, d, "paper_formula").boundary_parameter
            rev = knownclass.exp_class_reverse(lam0, d).boundary_parameter
            sym = knownclass.exp_class_symmetrized(lam0, d).boundary_parameter
            rows.append([d, exact / lam0, paper / lam0, rev / lam0, sym / lam0])
        header = ("d", "lambda_ratio_forward_exact", "lambda_ratio_forward_paper",
                  "lambda_ratio_reverse", "lambda_ratio_symmetrized")
    else:
        sols = [knownclass.uniform_class(args.alpha, d, args.kind) for d in ds]
        rows = [[d, s.boundary_parameter, s.mean] for d, s in zip(ds, sols)]
        header = ("d", "beta", "mean")
    with _open_output(args.output) as out:
        write_csv(header, rows, out)
    return EXIT_OK


CHECK_FIELDS = ("kind", "d", "closed_form_mean", "oracle_mean", "relative_gap", "passed")


def cmd_check(args) -> int:
    nominal = parse_nominal(args.nominal)
    kinds = [Divergence.parse(k) for k in args.kinds.split(",")] if args.kinds else list(Divergence)
    ds = parse_grid(args.d_grid, "d-grid") if args.d_grid else list(DEFAULT_CHECK_RADII)
    rows = [oracle.cross_check(nominal, kind, d, n=args.n, x_max=args.x_max, band=args.band,
                               spacing=args.spacing, mode=args.mode)
            for kind in kinds for d in ds]
    with _open_output(args.output) as out:
        write_csv(CHECK_FIELDS, ([getattr(r, f) for f in CHECK_FIELDS] for r in rows), out)
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"gap {r.relative_gap:.3g} outside band for {r.kind} at d={r.d:g}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# figure data ---------------------------------------------------------------


def _cdf_series(label, kind, mode, ds, xs, nominal):
    rows = []
    for d in ds:
        sol = solve(UncertaintySet(nominal, kind, d), mode=mode)
        F = worst_cdf(sol, xs)
        rows.extend([label, d, sol.mean, x, f] for x, f in zip(xs, F))
    return rows


def figure_rows(which: int, ds=None, sweep=None, xs=None):
    """Header and rows of the data behind figure ``which`` for Exp(1)."""
    nominal = Exponential(1.0)
    cdf_ds = list(ds) if ds is not None else list(FIGURE_CDF_RADII)
    xs = np.array(xs if xs is not None else parse_grid(FIGURE_X_GRID))
    header = ("series", "d", "mean", "x", "F")
    nominal_rows = [["nominal", 0.0, nominal.mean(), x, f] for x, f in zip(xs, nominal.cdf(xs))]
    fwd, rev = Divergence.FORWARD_KL, Divergence.REVERSE_KL
    if which == 1:
        rows = nominal_rows
        rows += _cdf_series("forward_kl", fwd, "kkt", cdf_ds, xs, nominal)
        rows += _cdf_series("reverse_kl_kkt", rev, "kkt", cdf_ds, xs, nominal)
        rows += _cdf_series("reverse_kl_paper_exact", rev, "paper-exact", cdf_ds, xs, nominal)
        return header, rows
    if which == 3:
        rows = nominal_rows
        rows += _cdf_series("symmetrized", Divergence.SYMMETRIZED, "kkt", cdf_ds, xs, nominal)
        rows += _cdf_series("forward_kl", fwd, "kkt", cdf_ds, xs, nominal)
        rows += _cdf_series("reverse_kl_kkt", rev, "kkt", cdf_ds, xs, nominal)
        return header, rows
    grid = list(sweep) if sweep is not None else parse_grid(FIGURE_SWEEP_GRID)
    if which == 2:
        rows = []
        for d in grid:
            rows.append([d,
                         solve(UncertaintySet(nominal, fwd, d)).mean,
                         solve(UncertaintySet(nominal, rev, d), mode="kkt").mean,
                         solve(UncertaintySet(nominal, rev, d), mode="paper-exact").mean,
                         solve(UncertaintySet(nominal, Divergence.SYMMETRIZED, d)).mean])
        return ("d", "forward_kl", "reverse_kl_kkt", "reverse_kl_paper_exact", "symmetrized"), rows
    if which == 4:
        rows = []
        for d in grid:
            rows.append([d,
                         knownclass.exp_class_forward(1.0, d).boundary_parameter,
                         knownclass.exp_class_forward(1.0, d, "paper_formula").boundary_parameter,
                         knownclass.exp_class_reverse(1.0, d).boundary_parameter,
                         knownclass.exp_class_symmetrized(1.0, d).boundary_parameter])
        return ("d", "lambda_ratio_forward_exact", "lambda_ratio_forward_paper",
                "lambda_ratio_reverse", "lambda_ratio_symmetrized"), rows
    raise DomainError(f"unknown figure {which!r}; choose 1, 2, 3 or 4")


def cmd_figures(args) -> int:
    ds = parse_grid(args.d_grid, "d-grid") if args.d_grid else None
    sweep = parse_grid(args.sweep_grid, "sweep-grid") if args.sweep_grid else None
    xs = parse_grid(args.x_grid, "x-grid") if args.x_grid else None
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for which in sorted(set(args.which)):
        header, rows = figure_rows(which, ds, sweep, xs)
        path = out_dir / f"figure{which}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(header, rows, fh)
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_problem(p, *, single_d=True):
    p.add_argument("--nominal", required=True,
                   help="exp:RATE, uniform:UPPER or table:PATH (CSV with header x,pdf)")
    p.add_argument("--kind", required=True, choices=KINDS)
    if single_d:
        p.add_argument("--d", required=True, type=float, help="divergence radius in nats")
    p.add_argument("--mode", default="kkt", choices=MODES,
                   help="reverse-KL equation (default kkt)")
    p.add_argument("--path", default="auto", choices=("auto", "closed-form", "quadrature"),
                   help="closed-form exponential path or generic quadrature")
    p.add_argument("--tol", type=float, default=None, help="root tolerance override")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="robustwpt",
                             description="Worst-case average harvested energy over "
                                         "divergence balls around a nominal law.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("solve", help="single worst-case solve")
    _add_problem(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="worst-case mean over a d-grid")
    _add_problem(p, single_d=False)
    p.add_argument("--d-grid", required=True, help="start:stop:step (inclusive) or a,b,c")
    p.add_argument("--workers", type=int, default=4, help="parallel solves (default 4)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cdf", help="nominal and worst-case CDF table")
    _add_problem(p)
    p.add_argument("--x-grid", default=None,
                   help="start:stop:step or a,b,c (default: 201 points over the bulk)")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("knownclass", help="known-class boundary parameters over a d-grid")
    p.add_argument("--family", choices=("exp", "uniform"), default="exp")
    p.add_argument("--lambda0", type=float, default=1.0, help="nominal rate (exp family)")
    p.add_argument("--alpha", type=float, default=1.0, help="nominal upper end (uniform family)")
    p.add_argument("--kind", choices=KINDS, default="reverse-kl",
                   help="divergence for the uniform family (default reverse-kl)")
    p.add_argument("--d-grid", default="0:3:0.05")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_knownclass)

    p = sub.add_parser("check", help="closed-form means against the grid oracle")
    p.add_argument("--nominal", default="exp:1.0")
    p.add_argument("--kinds", default=None, help="comma list (default: all three)")
    p.add_argument("--d-grid", default=None, help="default 0,0.05,0.1,0.2,0.5,1,2")
    p.add_argument("--mode", default="kkt", choices=MODES)
    p.add_argument("--n", type=int, default=oracle.DEFAULT_GRID_POINTS)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--spacing", choices=("graded", "uniform"), default="graded")
    p.add_argument("--band", type=float, default=0.01)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("figures", help="write figureN.csv data files")
    p.add_argument("--which", type=int, action="append", choices=(1, 2, 3, 4), default=None,
                   help="figure number, repeatable (default: all)")
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--d-grid", default=None, help="radii for the CDF figures")
    p.add_argument("--sweep-grid", default=None, help="radii for the mean and ratio figures")
    p.add_argument("--x-grid", default=None, help="energy grid for the CDF figures")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "which", 0) is None:
            args.which = [1, 2, 3, 4]
        return args.func(args)
    except InfiniteDivergenceError as exc:
        print(f"error: infinite divergence: {exc}", file=sys.stderr)
        return EXIT_INFINITE
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RobustWPTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
