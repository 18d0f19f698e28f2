"""Runtime self-checks: every redundant route the package carries, compared.

Each check returns a CheckResult whose margin is value / tolerance, so
anything at or below 1 passes.  The boundary-row check deliberately
replays solved coefficients through the raw single-harmonic assembly
rather than the equilibrated batch path used for solving: a sign error
planted in either assembly is caught by the disagreement.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import laplace
from .config import MU0, HarmonicTruncation, MotorDesign
from .halbach import fourier_coefficients, reconstruct_profiles
from .poisson import (
    evaluate_fields_scalar,
    evaluate_fields_vector,
    solve_scalar,
    solve_vector,
    vector_from_hybrid,
)
from .quantities import power_balance

TOL_CLOSED = 1e-10
TOL_MAP = 1e-12
TOL_FIELDS = 1e-10
TOL_ROWS = 1e-9
TOL_JUMPS = 0.01
TOL_POWER = 1e-9
TOL_FD = 0.03


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str


def _result(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    margin = value / tol
    tail = f" [{detail}]" if detail else ""
    return CheckResult(name, margin <= 1.0, margin,
                       f"value {value:.3e} vs tol {tol:.1e}{tail}")


def _case_tag(design: MotorDesign) -> str:
    return f"N_m={design.N_m} {'iron' if design.back_iron else 'open'}"


def check_closed_vs_dense(design: MotorDesign, src, coeffs) -> CheckResult:
    closed = laplace.closed_form_coefficients(design, src)
    scale = float(np.abs(closed.stack()).max())
    dev = float(np.abs(coeffs.stack() - closed.stack()).max()) / scale
    return _result(f"closed-vs-dense {_case_tag(design)}", dev, TOL_CLOSED)


def check_tri_model(design: MotorDesign, src, coeffs,
                    n_points: int = 200, seed: int = 2024) -> list[CheckResult]:
    c2 = solve_scalar(design, src)
    c3 = solve_vector(design, src)
    scale = float(np.abs(coeffs.stack()).max())
    dev_scalar = float(np.abs(c2.stack() - coeffs.stack()).max()) / scale
    dev_vector = float(np.abs(c3.stack() - vector_from_hybrid(coeffs).stack()).max()
                       / (MU0 * scale))
    tag = _case_tag(design)
    out = [_result(f"tri-model maps {tag}", max(dev_scalar, dev_vector), TOL_MAP)]

    rng = np.random.default_rng(seed)
    y_top = design.g_e + design.h_m
    y_max = y_top if design.back_iron else 1.8 * y_top
    worst = 0.0
    for _ in range(n_points):
        x = float(rng.uniform(0, design.lam))
        y = float(rng.uniform(1e-6, y_max - 1e-9))
        f1 = laplace.evaluate_fields(design, src, coeffs, x, y)
        f2 = evaluate_fields_scalar(design, src, c2, x, y)
        f3 = evaluate_fields_vector(design, src, c3, x, y)
        b_scale = max(abs(f1.B_x), abs(f1.B_y), 1e-3)
        h_scale = b_scale / MU0
        for f in (f2, f3):
            worst = max(worst,
                        abs(f.B_x - f1.B_x) / b_scale, abs(f.B_y - f1.B_y) / b_scale,
                        abs(f.H_x - f1.H_x) / h_scale, abs(f.H_y - f1.H_y) / h_scale)
    out.append(_result(f"tri-model fields {tag}", worst, TOL_FIELDS,
                       f"{n_points} points"))
    return out


def check_boundary_rows(design: MotorDesign, src, coeffs) -> CheckResult:
    """Replay solved coefficients through the raw per-harmonic assembly."""
    stacked = coeffs.stack()
    worst = 0.0
    for i in range(coeffs.n_active):
        n = int(coeffs.n[i])
        A, rhs = laplace.assemble_system(design, src, n)
        nb = float(np.linalg.norm(rhs))
        if nb == 0:
            continue
        res = float(np.linalg.norm(A @ stacked[i] - rhs)) / nb
        worst = max(worst, res)
    return _result(f"boundary-rows {_case_tag(design)}", worst, TOL_ROWS,
                   f"{coeffs.n_active} harmonics")


def check_interface_jumps(design: MotorDesign, src, coeffs,
                          nx: int = 256) -> CheckResult:
    """Physical continuity and jump conditions at the two array faces.

    At each face the outside region (I below, III above) and region II
    limits must give continuous B_y and H_x, a B_x step of mu0 K_m, and an
    H_y step of sigma_m / mu0, each against the truncated reconstructions.
    With back iron the top face instead requires the true H_x to vanish.
    Deviations are normalized by the largest magnitude of that component
    seen along the face.
    """
    xs = np.arange(nx) * design.lam / nx
    km, sm = reconstruct_profiles(src, design.k, xs)
    faces = [(design.g_e, "I", 1.0)]
    if not design.back_iron:
        faces.append((design.g_e + design.h_m, "III", 1.0))
    worst = 0.0
    for y, outside, sgn in faces:
        lo = [laplace.evaluate_fields(design, src, coeffs, float(x), y, region="II")
              for x in xs]
        hi = [laplace.evaluate_fields(design, src, coeffs, float(x), y, region=outside)
              for x in xs]
        by2 = np.array([f.B_y for f in lo])
        byo = np.array([f.B_y for f in hi])
        hx2 = np.array([f.H_x for f in lo])
        hxo = np.array([f.H_x for f in hi])
        bx2 = np.array([f.B_x for f in lo])
        bxo = np.array([f.B_x for f in hi])
        hy2 = np.array([f.H_y for f in lo])
        hyo = np.array([f.H_y for f in hi])
        s_by = max(np.abs(by2).max(), np.abs(byo).max())
        s_hx = max(np.abs(hx2).max(), np.abs(hxo).max(), design.M * 1e-3)
        s_bx = max(np.abs(bx2).max(), np.abs(bxo).max(), MU0 * design.M * 1e-3)
        s_hy = max(np.abs(hy2).max(), np.abs(hyo).max())
        worst = max(
            worst,
            float(np.abs(byo - by2).max()) / s_by,
            float(np.abs(hxo - hx2).max()) / s_hx,
            float(np.abs((bxo - bx2) * sgn - MU0 * km).max()) / s_bx,
            float(np.abs((hy2 - hyo) * sgn - sm / MU0).max()) / s_hy,
        )
    if design.back_iron:
        y = design.g_e + design.h_m
        hx = np.array([laplace.evaluate_fields(design, src, coeffs, float(x), y,
                                               region="II").H_x for x in xs])
        worst = max(worst, float(np.abs(hx).max()) / design.M)
    return _result(f"interface-jumps {_case_tag(design)}", worst, TOL_JUMPS,
                   f"{nx}-point line")


def check_power_balance(design: MotorDesign, coeffs) -> CheckResult:
    pb = power_balance(design, coeffs, x_0=design.lam / 8)
    return _result(f"power-balance {_case_tag(design)}", pb.max_rel_dev, TOL_POWER)


def check_fd_midgap(design: MotorDesign, coeffs, nx: int = 1024,
                    ny: int = 512) -> CheckResult:
    from .fdcheck import midgap_comparison, solve_scalar_poisson

    grid = solve_scalar_poisson(design, nx, ny)
    rep = midgap_comparison(design, grid, coeffs)
    return _result(f"fd-midgap {_case_tag(design)}", rep.max_rel_err, TOL_FD,
                   f"{nx}x{ny}, residual {grid.residual:.1e}")


def verify_design(design: MotorDesign, trunc: HarmonicTruncation | None = None,
                  skip_fd: bool = False) -> list[CheckResult]:
    """All self-checks for one design point."""
    trunc = trunc or HarmonicTruncation()
    src = fourier_coefficients(design, trunc)
    coeffs = laplace.solve_coefficients(design, src)
    results = [check_closed_vs_dense(design, src, coeffs)]
    results += check_tri_model(design, src, coeffs)
    results.append(check_boundary_rows(design, src, coeffs))
    results.append(check_interface_jumps(design, src, coeffs))
    results.append(check_power_balance(design, coeffs))
    if not skip_fd:
        results.append(check_fd_midgap(design, coeffs))
    return results


def verify_suite(design: MotorDesign, trunc: HarmonicTruncation | None = None,
                 skip_fd: bool = False) -> list[CheckResult]:
    """The full suite: the config's geometry swept over N_m 2..5 and both
    topologies."""
    results = []
    for back_iron in (False, True):
        for n_m in (2, 3, 4, 5):
            d = dataclasses.replace(design, N_m=n_m, back_iron=back_iron)
            results += verify_design(d, trunc, skip_fd)
    return results


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.name}: margin {r.margin:.2e} ({r.detail})")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
