"""Command-line driver: ``payne-lab {strip,eig,verify,sweep,crossing}``.

Every command prints either one JSON document
``{command, inputs, rows, summary, reports}`` or a CSV table preceded by
``#`` header lines carrying the same inputs and summary. Output contains no
timestamps, so equal inputs give byte-identical output.

Exit codes: 0 success, 1 an inequality failed, 2 bad input, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import eigensolver as es
from . import inequality_lab as il
from . import strip_mode
from .config import TOLERANCE_ENV, RunConfig, parse_tolerances
from .convex_geometry import load_polygon, min_width
from .errors import InputError, NoCrossing, NoRootInBracket, SolverError
from .reports import CSV_COLUMNS, InequalityReport, _jsonable

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
BASE_DIVISIONS = 32
CURVE_SAMPLES = 200

log = logging.getLogger("payne_lab")


class Output:
    """Collected result of one command."""

    def __init__(self, command: str, inputs: dict, columns: Sequence[str]):
        self.command = command
        self.inputs = inputs
        self.columns = list(columns)
        self.rows: list[dict] = []
        self.summary: dict[str, Any] = {}
        self.reports: list[InequalityReport] = []

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs, "rows": self.rows,
               "summary": self.summary, "reports": [r.to_dict() for r in self.reports]}
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# command: {self.command}\n")
        buf.write(f"# inputs: {json.dumps(_jsonable(self.inputs), sort_keys=True)}\n")
        buf.write(f"# summary: {json.dumps(_jsonable(self.summary), sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        if self.rows:
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([_cell(row[c]) for c in self.columns])
        else:
            w.writerow(CSV_COLUMNS)
            for r in self.reports:
                w.writerow(r.csv_row())
        return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _levels(cfg: RunConfig, poly) -> list[float]:
    n = cfg.levels or 3
    if cfg.grid_h is not None:
        return [cfg.grid_h / 2**i for i in range(n)]
    return es.default_levels(poly, [BASE_DIVISIONS * 2**i for i in range(n)])


def _inputs(cfg: RunConfig, **extra) -> dict:
    d = {"polygon_path": str(cfg.polygon_path) if cfg.polygon_path else None,
         "grid_h": cfg.grid_h, "levels": cfg.levels, "format": cfg.output_format,
         "tolerance_env": TOLERANCE_ENV,
         "tolerance_overrides": dict(sorted(cfg.tolerance_overrides.items()))}
    d.update(extra)
    return d


def _study_dict(s: es.ConvergenceStudy) -> dict:
    return {"kind": s.kind, "extrapolated": s.extrapolated, "observed_order": s.observed_order,
            "orders": s.orders, "error_estimate": s.error_estimate}


# ---------------------------------------------------------------------------
# commands


def cmd_strip(cfg: RunConfig, mu_min: float, mu_max: float, n_samples: int) -> Output:
    if not (0.0 <= mu_min < mu_max and math.isfinite(mu_max)):
        raise InputError(f"need 0 <= mu_min < mu_max, got ({mu_min}, {mu_max})")
    if n_samples < 2:
        raise InputError("n_samples must be >= 2")
    out = Output("strip", _inputs(cfg, mu_min=mu_min, mu_max=mu_max, n_samples=n_samples),
                 ["mu", "Lambda_mu", "upper_bound"])
    tol = cfg.tol("root_tol")
    for mu in np.linspace(mu_min, mu_max, n_samples):
        lam = strip_mode.smallest_lambda(float(mu), tol=tol).lambda_mu
        ub = strip_mode.upper_bound_mu(float(mu))
        out.rows.append({"mu": float(mu), "Lambda_mu": lam, "upper_bound": ub})
        out.reports.append(InequalityReport(f"strip_bound[mu={float(mu):.6g}]", lam, ub, 1e-9))
    mu_star, sigma = strip_mode.minimize_sigma()
    out.summary = {"mu_star": mu_star, "sigma": sigma, "payne_thin_constant": strip_mode.SIGMA_BOUND}
    out.reports.append(InequalityReport("sigma_below_8sqrt2_over_3", sigma, strip_mode.SIGMA_BOUND))
    return out


def cmd_eig(cfg: RunConfig, which: str) -> Output:
    poly = load_polygon(cfg.polygon_path)
    levels = _levels(cfg, poly)
    study = es.refine_study(poly, which, levels, tol=cfg.tol("eigen_tol"))
    out = Output("eig", _inputs(cfg, which=which), ["h", "value"])
    out.rows = [{"h": h, "value": v} for h, v in study.levels]
    out.summary = _study_dict(study)
    out.summary["polygon"] = poly.name
    return out


def cmd_verify(cfg: RunConfig) -> Output:
    poly = load_polygon(cfg.polygon_path)
    v = il.verify_polygon(poly, _levels(cfg, poly), tol=cfg.tol("eigen_tol"))
    out = Output("verify", _inputs(cfg), CSV_COLUMNS)
    g = v.geometry
    out.summary = {"polygon": poly.name, "diameter": g.diameter, "min_width": g.min_width,
                   "inradius": g.inradius, "area": g.area, "lambda": v.lam.value,
                   "Lambda": v.Lam.value, "ratio": v.ratio, "T": v.T.value,
                   "dirichlet": _study_dict(v.dirichlet), "buckling": _study_dict(v.buckling)}
    out.reports = v.reports
    return out


def cmd_sweep(cfg: RunConfig, aspect_max: int) -> Output:
    if aspect_max < 1:
        raise InputError("aspect_max must be >= 1")
    aspects = [2**i for i in range(int(math.log2(aspect_max)) + 1)]
    res = il.strip_limit_experiment(aspects)
    out = Output("sweep", _inputs(cfg, aspect_max=aspect_max), ["k", "lambda", "Lambda", "ratio"])
    for r in res.rows:
        out.rows.append({"k": int(r.aspect), "lambda": r.lam, "Lambda": r.Lam, "ratio": r.ratio})
        tol = il.TOL_FACTOR * (r.Lam_err + 4 * r.lam_err)
        out.reports.append(InequalityReport(f"payne[k={int(r.aspect)}]", r.Lam, 4 * r.lam, tol))
    out.summary = {"sigma": res.sigma, "mu_star": res.mu_star, "final_ratio": res.rows[-1].ratio,
                   "final_gap_to_sigma": res.final_gap, "non_increasing": res.non_increasing,
                   "non_decreasing": res.non_decreasing}
    return out


def cmd_crossing(cfg: RunConfig, n: int) -> Output:
    if n < 2:
        raise InputError("n must be >= 2")
    T_star, C = il.crossing_point(n, tol=cfg.tol("crossing_tol"))
    out = Output("crossing", _inputs(cfg, n=n), ["T", "improved_bound", "thin_bound"])
    for p in il.bound_curve(np.linspace(0.0, 2.0 * T_star, CURVE_SAMPLES), n):
        out.rows.append({"T": p.T, "improved_bound": p.improved_bound, "thin_bound": p.thin_bound})
    out.summary = {"T_star": T_star, "C_n": C}
    out.reports.append(InequalityReport("C_n_below_4", C, 4.0))
    return out


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="payne-lab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", metavar="KEY=VAL[,KEY=VAL]",
                        help=f"tolerance overrides; also read from ${TOLERANCE_ENV}")
    common.add_argument("-v", "--verbose", action="store_true")
    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--levels", type=int, help="number of grid levels (>= 3, default 3)")
    grid.add_argument("--grid-h", type=float, help="coarsest spacing; default min width / 32")

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("strip", parents=[common], help="strip mode table and sigma")
    s.add_argument("mu_min", type=float, nargs="?", default=0.0)
    s.add_argument("mu_max", type=float, nargs="?", default=4.0)
    s.add_argument("n_samples", type=int, nargs="?", default=101)

    e = sub.add_parser("eig", parents=[common, grid], help="convergence study of one eigenvalue")
    e.add_argument("polygon", type=Path)
    e.add_argument("which", nargs="?", choices=("dirichlet", "buckling"), default="dirichlet")

    v = sub.add_parser("verify", parents=[common, grid], help="run every inequality check")
    v.add_argument("polygon", type=Path)

    w = sub.add_parser("sweep", parents=[common], help="Lambda/lambda on 1 x k rectangles")
    w.add_argument("aspect_max", type=int, nargs="?", default=16)

    c = sub.add_parser("crossing", parents=[common], help="crossing of the two bound curves")
    c.add_argument("n", type=int, nargs="?", default=2)
    return p


def run(args: argparse.Namespace) -> Output:
    cfg = RunConfig.with_env(command=args.command, polygon_path=getattr(args, "polygon", None),
                             grid_h=getattr(args, "grid_h", None),
                             levels=getattr(args, "levels", None), output_format=args.format,
                             tolerance_overrides=parse_tolerances(args.tol))
    if args.command == "strip":
        return cmd_strip(cfg, args.mu_min, args.mu_max, args.n_samples)
    if args.command == "eig":
        return cmd_eig(cfg, args.which)
    if args.command == "verify":
        return cmd_verify(cfg)
    if args.command == "sweep":
        return cmd_sweep(cfg, args.aspect_max)
    return cmd_crossing(cfg, args.n)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:          # argparse usage errors are input errors
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        out = run(args)
    except (NoRootInBracket, NoCrossing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    sys.stdout.write(out.to_json() if args.format == "json" else out.to_csv())
    if not out.passed:
        for r in out.reports:
            if not r.passed:
                print(f"inequality failed: {r}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
