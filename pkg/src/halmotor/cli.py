"""Command-line front end.

Every subcommand loads a ``key = value`` config file, writes CSV files plus a
``manifest.json`` into the output directory, and prints a short summary.  CSV
is the only output format: one header line, fixed column order, floats at full
precision ("%.17g"); plotting is left to external tools.

Subcommands: fields, force, emf, normal, sweep, optimize, sizing, verify.

Defaults (used when a flag is not given):

    --out           .              all subcommands
    --nmax          config value   all (config default 199)
    --model         laplace        fields
    --grid          256x128        fields: one wavelength by the full stack
    --ymax          g_e + h_m      fields: top of the mapped band
    --x0            force-angle optimum (force); 0.0 (emf)
    --nt            720            force, emf: samples per electrical period
    --nscan         360            force: force-angle sweep points
    --g0            config value   normal (gap_offset_m, default 0)
    normal offsets  13 rows from 0 to g0 (a single row when g0 = 0)
    --coarse        9              optimize: coarse points per axis
    --passes        2              optimize: halving refinement passes
    --j-av          config J_max   sizing
    FD oracle grid  1024x512       verify (--skip-fd bypasses it)
    stage           --stage-length 0.6  --stage-mass 100  --depth 0.3
                    --moving moving-PM  --nsu <units + 1>
    objective       --alpha 1.0  --beta 0.2  --w-thd/--w-ripple/--w-cost 0.0

Exit codes: 0 success, 1 physics-check failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import fdcheck, laplace, poisson, quantities, studio, verify
from .config import HarmonicTruncation, MotorDesign, load_design
from .errors import HalmotorError, NoConvergence, SingularSystem
from .halbach import fourier_coefficients

_VERSION = "0.1.0"

_MODELS = {
    "laplace": (laplace.solve_coefficients, laplace.evaluate_fields),
    poisson.MODEL_SCALAR: (poisson.solve_scalar, poisson.evaluate_fields_scalar),
    poisson.MODEL_VECTOR: (poisson.solve_vector, poisson.evaluate_fields_vector),
}


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if value is None:
        return "nan"
    return format(float(value), ".17g")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


class Run:
    """Output directory plus the manifest that records what a run produced."""

    def __init__(self, args: argparse.Namespace, command: str):
        self.out = args.out
        os.makedirs(self.out, exist_ok=True)
        self.command = command
        self.config = os.path.abspath(args.config)
        self.outputs: list[str] = []
        self.started = time.perf_counter()
        skip = {"func", "config", "out"}
        self.params = {k: _jsonable(v) for k, v in vars(args).items()
                       if k not in skip}

    def path(self, name: str) -> str:
        self.outputs.append(name)
        return os.path.join(self.out, name)

    def finish(self, design: MotorDesign, trunc: HarmonicTruncation) -> None:
        self.params["design"] = dataclasses.asdict(design)
        self.params["n_max_harmonic"] = trunc.n_max
        _write_json(os.path.join(self.out, "manifest.json"), {
            "command": self.command,
            "config": self.config,
            "params": self.params,
            "outputs": self.outputs,
            "version": _VERSION,
            "duration_s": time.perf_counter() - self.started,
        })


def _load(args: argparse.Namespace) -> tuple[MotorDesign, HarmonicTruncation]:
    design, trunc = load_design(args.config)
    if getattr(args, "nmax", None) is not None:
        trunc = HarmonicTruncation(args.nmax)
    return design, trunc


def _grid_spec(text: str) -> tuple[int, int]:
    nx, _, ny = text.lower().partition("x")
    try:
        pair = int(nx), int(ny)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NXxNY, got {text!r}")
    if pair[0] < 2 or pair[1] < 2:
        raise argparse.ArgumentTypeError("grid must be at least 2x2")
    return pair


def _axis_spec(text: str) -> tuple[str, np.ndarray]:
    key, eq, span = text.partition("=")
    parts = span.split(":")
    if not eq or len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected KEY=LO:HI:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axis numbers in {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("axis needs at least one point")
    return key.strip(), np.linspace(lo, hi, n)


def _bounds_spec(text: str) -> tuple[str, tuple[float, float]]:
    key, eq, span = text.partition("=")
    parts = span.split(":")
    if not eq or len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected KEY=LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bounds in {text!r}")
    return key.strip(), (lo, hi)


def _stage(args: argparse.Namespace) -> studio.StageSpec:
    return studio.StageSpec(L_stage=args.stage_length, m_stage=args.stage_mass,
                            L_depth=args.depth, moving_member=args.moving,
                            N_su=args.nsu)


def _objective(args: argparse.Namespace) -> studio.ObjectiveConfig:
    return studio.ObjectiveConfig(alpha=args.alpha, beta=args.beta,
                                  w_thd=args.w_thd, w_ripple=args.w_ripple,
                                  w_cost=args.w_cost,
                                  cost_drive=args.cost_drive)


def cmd_fields(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "fields")
    solver, evaluator = _MODELS[args.model]
    src = fourier_coefficients(design, trunc)
    coeffs = solver(design, src)
    nx, ny = args.grid
    xs = np.arange(nx) * design.lam / nx
    y_max = design.g_e + design.h_m if args.ymax is None else args.ymax
    ys = np.linspace(0.0, y_max, ny)
    samples = laplace.field_map(design, src, coeffs, xs, ys, evaluator)
    _write_csv(run.path("fields.csv"),
               ["x", "y", "region", "B_x", "B_y", "H_x", "H_y", "psi", "A_z"],
               ([s.x, s.y, s.region, s.B_x, s.B_y, s.H_x, s.H_y, s.psi, s.A_z]
                for s in samples))
    run.finish(design, trunc)
    print(f"fields: {nx}x{ny} {args.model} map -> {run.out}/fields.csv")
    return 0


def cmd_force(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "force")
    coeffs = laplace.solve_coefficients(design, fourier_coefficients(design, trunc))
    x0s, totals = quantities.force_angle_sweep(design, coeffs, args.nscan)
    _write_csv(run.path("force_angle.csv"), ["x_0", "f_total"],
               zip(x0s, totals))
    x_0 = args.x0
    if x_0 is None:
        x_0, _ = quantities.optimal_shift(design, coeffs, args.nscan)
    force = quantities.thrust_time_series(design, coeffs, x_0, args.nt)
    header = (["t"] + [f"f_phase_{m}" for m in range(1, design.N_ph + 1)]
              + ["f_total", "f_mean", "ripple_pct"])
    rows = ([force.t[i]] + list(force.per_phase[:, i])
            + [force.total[i], force.mean, force.ripple_pct]
            for i in range(len(force.t)))
    _write_csv(run.path("force_profile.csv"), header, rows)
    run.finish(design, trunc)
    print(f"force: x_0 = {x_0:.6g} m, mean = {force.mean:.6f} N, "
          f"ripple = {force.ripple_pct:.4f} %")
    return 0


def cmd_emf(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "emf")
    coeffs = laplace.solve_coefficients(design, fourier_coefficients(design, trunc))
    ts = np.arange(args.nt) / (args.nt * design.f)
    emf = quantities.back_emf(design, coeffs, ts, args.x0)
    thd = quantities.emf_thd(design, coeffs, args.x0, args.nt)
    phases = range(1, design.N_ph + 1)
    header = (["t"] + [f"lambda_{m}" for m in phases]
              + [f"emf_{m}" for m in phases] + [f"i_{m}" for m in phases]
              + [f"thd_{m}" for m in phases])
    rows = ([ts[i]] + list(emf.flux_linkage[:, i]) + list(emf.emf[:, i])
            + list(emf.current[:, i]) + list(thd)
            for i in range(len(ts)))
    _write_csv(run.path("emf.csv"), header, rows)
    run.finish(design, trunc)
    peak = float(np.abs(emf.emf).max())
    print(f"emf: peak = {peak:.4f} V, THD = {float(thd[0]):.6f}")
    return 0


def cmd_normal(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "normal")
    g0_max = design.g_0 if args.g0 is None else args.g0
    offsets = np.linspace(0.0, g0_max, 13) if g0_max > 0 else np.array([0.0])
    rows = []
    for g0 in offsets:
        r = quantities.misalignment_force(design, trunc, g_0=float(g0))
        rows.append([r.g_0, r.nominal, r.small_gap, r.large_gap, r.net])
    _write_csv(run.path("normal.csv"),
               ["g_0", "f_nominal", "f_small_gap", "f_large_gap", "f_net"],
               rows)
    run.finish(design, trunc)
    print(f"normal: per-side pull {rows[0][1]:.4f} N, "
          f"net at g_0 = {g0_max:.4g} m: {rows[-1][4]:.4f} N")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "verify")
    results = verify.verify_suite(design, trunc, skip_fd=args.skip_fd)
    print(verify.format_report(results))
    _write_csv(run.path("verify_report.csv"),
               ["name", "status", "margin", "detail"],
               ([r.name, "PASS" if r.passed else "FAIL", r.margin, r.detail]
                for r in results))
    run.finish(design, trunc)
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "sweep")
    axes = dict(args.axis)
    result = studio.sweep(design, _stage(args), _objective(args), axes, trunc)
    _write_csv(run.path("sweep.csv"), list(result.columns), result.table)
    _write_json(run.path("summary.json"), {
        "best_index": result.best_index,
        "best_point": _jsonable(result.best_point),
        "best_score": result.best_score,
        "points": int(result.table.shape[0]),
    })
    run.finish(design, trunc)
    best = ", ".join(f"{k} = {v:.6g}" for k, v in result.best_point.items())
    print(f"sweep: {result.table.shape[0]} points, "
          f"best score {result.best_score:.6f} at {best}")
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "optimize")
    bounds = dict(args.bounds)
    result = studio.optimize(design, _stage(args), _objective(args), bounds,
                             trunc, coarse=args.coarse, passes=args.passes)
    _write_csv(run.path("optimize_trace.csv"), list(result.trace_columns),
               result.trace)
    _write_json(run.path("summary.json"), {
        "best_point": _jsonable(result.best_point),
        "best_score": result.best_score,
        "best_metrics": _jsonable(dataclasses.asdict(result.best_metrics)),
        "evaluations": int(result.trace.shape[0]),
        "incumbent_scores": _jsonable(result.incumbent_scores),
    })
    run.finish(design, trunc)
    best = ", ".join(f"{k} = {v:.6g}" for k, v in result.best_point.items())
    print(f"optimize: {result.trace.shape[0]} evaluations, "
          f"best score {result.best_score:.6f} at {best}")
    return 0


def cmd_sizing(args: argparse.Namespace) -> int:
    design, trunc = _load(args)
    run = Run(args, "sizing")
    j_av = design.J_max if args.j_av is None else args.j_av
    sizing = studio.initial_sizing(args.b_av, j_av, design)
    _write_csv(run.path("sizing.csv"),
               ["tau_av_N_per_m2", "f_av_N", "p_per_volume_W_per_m3"],
               [[sizing.tau_av, sizing.f_av, sizing.p_per_volume]])
    run.finish(design, trunc)
    print(f"shear stress: {sizing.tau_av:.6g} N/m^2")
    print(f"unit-cell force: {sizing.f_av:.6g} N")
    print(f"loss density: {sizing.p_per_volume:.6g} W/m^3")
    return 0


def _add_stage_objective(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--stage-length", type=float, default=0.6,
                     help="stage length in m (default 0.6)")
    sub.add_argument("--stage-mass", type=float, default=100.0,
                     help="payload-side stage mass in kg (default 100)")
    sub.add_argument("--depth", type=float, default=0.3,
                     help="stage in-depth length in m (default 0.3)")
    sub.add_argument("--moving", choices=(studio.MOVING_PM, studio.MOVING_STATOR),
                     default=studio.MOVING_PM,
                     help="which member moves (default moving-PM)")
    sub.add_argument("--nsu", type=int, default=None,
                     help="stator unit count (default: PM units + 1)")
    sub.add_argument("--alpha", type=float, default=1.0,
                     help="acceleration exponent (default 1.0)")
    sub.add_argument("--beta", type=float, default=0.2,
                     help="copper-loss exponent (default 0.2)")
    sub.add_argument("--w-thd", type=float, default=0.0,
                     help="EMF THD weight in the extended objective")
    sub.add_argument("--w-ripple", type=float, default=0.0,
                     help="force-ripple weight in the extended objective")
    sub.add_argument("--w-cost", type=float, default=0.0,
                     help="drive-cost weight in the extended objective")
    sub.add_argument("--cost-drive", type=float, default=None,
                     help="drive cost scalar, required when --w-cost > 0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halmotor",
        description="Field solutions and design studies for slotless "
                    "double-sided Halbach linear motors.")
    parser.add_argument("--version", action="version", version=_VERSION)
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="design config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--nmax", type=int, default=None,
                       help="override the config's harmonic truncation")
        p.set_defaults(func=func)
        return p

    p = sub("fields", cmd_fields, "field map over one wavelength")
    p.add_argument("--model", choices=tuple(_MODELS), default="laplace",
                   help="solution formulation (default laplace)")
    p.add_argument("--grid", type=_grid_spec, default=(256, 128),
                   metavar="NXxNY", help="map resolution (default 256x128)")
    p.add_argument("--ymax", type=float, default=None,
                   help="top of the mapped band in m (default: g_e + h_m)")

    p = sub("force", cmd_force, "thrust profile and force-angle sweep")
    p.add_argument("--x0", type=float, default=None,
                   help="array shift in m (default: force-angle optimum)")
    p.add_argument("--nt", type=int, default=720,
                   help="time samples per period (default 720)")
    p.add_argument("--nscan", type=int, default=360,
                   help="force-angle sweep points (default 360)")

    p = sub("emf", cmd_emf, "flux linkage, back-EMF, and phase currents")
    p.add_argument("--x0", type=float, default=0.0,
                   help="array shift in m (default 0)")
    p.add_argument("--nt", type=int, default=720,
                   help="time samples per period (default 720)")

    p = sub("normal", cmd_normal, "attraction force and misalignment sweep")
    p.add_argument("--g0", type=float, default=None,
                   help="max gap offset in m (default: config gap_offset_m)")

    p = sub("sweep", cmd_sweep, "full-factorial design sweep")
    p.add_argument("--axis", type=_axis_spec, action="append", required=True,
                   metavar="KEY=LO:HI:N",
                   help="sweep axis, one of lam/h_m/h_c (repeatable)")
    _add_stage_objective(p)

    p = sub("optimize", cmd_optimize, "coarse-to-fine design optimization")
    p.add_argument("--bounds", type=_bounds_spec, action="append",
                   required=True, metavar="KEY=LO:HI",
                   help="axis bounds, one of lam/h_m/h_c (repeatable)")
    p.add_argument("--coarse", type=int, default=9,
                   help="coarse grid points per axis (default 9)")
    p.add_argument("--passes", type=int, default=2,
                   help="refinement passes (default 2)")
    _add_stage_objective(p)

    p = sub("sizing", cmd_sizing, "rule-of-thumb initial sizing")
    p.add_argument("--b-av", type=float, required=True,
                   help="average airgap flux density in T")
    p.add_argument("--j-av", type=float, default=None,
                   help="average current density in A/m^2 (default: config)")

    p = sub("verify", cmd_verify, "run the physics verification suite")
    p.add_argument("--skip-fd", action="store_true",
                   help="skip the finite-difference cross-check")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SingularSystem, NoConvergence) as exc:
        print(f"physics failure: {exc}", file=sys.stderr)
        return 1
    except (HalmotorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
