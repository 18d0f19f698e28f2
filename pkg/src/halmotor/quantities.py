"""Integral machine quantities: thrust, flux linkage, EMF, normal forces.

Everything here consumes the region-I amplitudes A1 of a solved harmonic
set.  Phase m's go conductors occupy [(m-3/2) w_s, (m-1/2) w_s] on the
stator (w_s = lambda / 2 N_ph), the return conductors sit half a
wavelength further on, and the array is displaced by u t + x_0.  Forces
are per stator unit cell (one wavelength, both airgaps) at depth L.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MU0, HarmonicTruncation, MotorDesign, all_phase_currents
from .errors import OffsetExceedsGap, ZeroVelocity
from .halbach import fourier_coefficients
from .laplace import FieldCoefficients, solve_coefficients


@dataclass(frozen=True)
class ForceResult:
    """Thrust over a time grid: per-phase rows plus their sum."""

    t: np.ndarray
    per_phase: np.ndarray
    total: np.ndarray
    mean: float
    ripple_pct: float


@dataclass(frozen=True)
class EmfResult:
    """Per-phase flux linkage, EMF, and terminal current over a time grid."""

    t: np.ndarray
    flux_linkage: np.ndarray
    emf: np.ndarray
    current: np.ndarray


@dataclass(frozen=True)
class NormalForceResult:
    """Per-side attraction and the net pull under a gap offset g_0."""

    g_0: float
    nominal: float
    small_gap: float
    large_gap: float
    net: float


@dataclass(frozen=True)
class PowerBalance:
    """Electrical sum(E_m I_m) against mechanical u F_t over a time grid."""

    t: np.ndarray
    electrical: np.ndarray
    mechanical: np.ndarray
    max_rel_dev: float


def _active(design: MotorDesign, coeffs: FieldCoefficients):
    act = slice(0, coeffs.n_active)
    ns = coeffs.n[act].astype(float)
    nk = ns * design.k
    return ns, nk, coeffs.A1[act]


def _edge_phases(design: MotorDesign, ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Slot-edge angles n k x for the left and right edge of every phase.

    Shapes (N_ph, H).  k x_left = (m - 3/2) pi / N_ph and so on, so the
    harmonics just multiply by n.
    """
    m = np.arange(1, design.N_ph + 1)[:, None]
    left = ns[None, :] * (m - 1.5) * np.pi / design.N_ph
    right = ns[None, :] * (m - 0.5) * np.pi / design.N_ph
    return left, right


def thrust(design: MotorDesign, coeffs: FieldCoefficients, t,
           x_0: float = 0.0) -> ForceResult:
    """Per-phase thrust on the array from the closed-form slot integrals.

    t may be a scalar or an array; ripple_pct is the peak-to-peak total
    force over the grid relative to its mean.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    ns, nk, A1 = _active(design, coeffs)
    amp = -8 * MU0 * design.L / nk * A1 * np.sinh(nk * design.h_c)
    left, right = _edge_phases(design, ns)
    motion = nk[None, :, None] * (design.u * ts + x_0)[None, None, :]
    window = (np.cos(left[:, :, None] - motion)
              - np.cos(right[:, :, None] - motion))
    J = all_phase_currents(design, ts)
    per_phase = J * np.einsum("h,mht->mt", amp, window)
    total = per_phase.sum(axis=0)
    mean = float(total.mean())
    ripple = 0.0 if mean == 0 else 100.0 * float(total.max() - total.min()) / mean
    return ForceResult(ts, per_phase, total, mean, ripple)


def thrust_time_series(design: MotorDesign, coeffs: FieldCoefficients,
                       x_0: float = 0.0, nt: int = 720) -> ForceResult:
    """Thrust over one electrical period on a uniform nt-point grid."""
    ts = np.arange(nt) / (nt * design.f)
    return thrust(design, coeffs, ts, x_0)


def thrust_quadrature(design: MotorDesign, coeffs: FieldCoefficients, t: float,
                      x_0: float = 0.0, nx: int = 8192, ny: int = 96) -> float:
    """Total thrust by midpoint quadrature of J B_y over the coil region.

    The independent route: build the slot current profile over one full
    wavelength (slots wrap modulo lambda, returns half a wavelength on),
    evaluate B_y on an nx-by-ny grid, and integrate.  The factor 2 counts
    both airgaps.
    """
    ns, nk, A1 = _active(design, coeffs)
    xs = (np.arange(nx) + 0.5) * design.lam / nx
    ys = (np.arange(ny) + 0.5) * design.h_c / ny
    Jm = all_phase_currents(design, float(t))[:, 0]
    ws = design.slot_width
    Jx = np.zeros(nx)
    for m in range(1, design.N_ph + 1):
        xl = (m - 1.5) * ws
        Jx += Jm[m - 1] * (((xs - xl) % design.lam) < ws)
        Jx -= Jm[m - 1] * (((xs - xl - design.lam / 2) % design.lam) < ws)
    shift = design.u * float(t) + x_0
    By = (np.cosh(np.outer(ys, nk)) * (-2 * MU0 * nk * A1)
          @ np.sin(np.outer(nk, xs - shift))).T
    integral = float((Jx[:, None] * By).sum()) * (design.lam / nx) * (design.h_c / ny)
    return 2 * design.L * integral


def force_angle_sweep(design: MotorDesign, coeffs: FieldCoefficients,
                      n_scan: int = 360, t: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Total thrust at t versus array shift x_0 over one wavelength."""
    x0s = np.arange(n_scan) * design.lam / n_scan
    ns, nk, A1 = _active(design, coeffs)
    amp = -8 * MU0 * design.L / nk * A1 * np.sinh(nk * design.h_c)
    left, right = _edge_phases(design, ns)
    motion = nk[None, :, None] * (design.u * t + x0s)[None, None, :]
    window = (np.cos(left[:, :, None] - motion)
              - np.cos(right[:, :, None] - motion))
    J = all_phase_currents(design, float(t))
    totals = (J * np.einsum("h,mht->mt", amp, window)).sum(axis=0)
    return x0s, totals


def optimal_shift(design: MotorDesign, coeffs: FieldCoefficients,
                  n_scan: int = 360) -> tuple[float, float]:
    """Array shift maximizing total thrust at t = 0, by dense scan."""
    x0s, totals = force_angle_sweep(design, coeffs, n_scan)
    i = int(np.argmax(totals))
    return float(x0s[i]), float(totals[i])


def back_emf(design: MotorDesign, coeffs: FieldCoefficients, t,
             x_0: float = 0.0) -> EmfResult:
    """Flux linkage and EMF per phase for N_turns-turn uniform coils.

    The linkage averages the vector potential over the slot area; with the
    slot integrals done analytically that leaves one sinh term per
    harmonic.  EMF is its exact time derivative.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    ns, nk, A1 = _active(design, coeffs)
    ws = design.slot_width
    amp_lam = (-8 * MU0 * design.L * design.N_turns * A1 * np.sinh(nk * design.h_c)
               / (nk ** 2 * design.h_c * ws))
    amp_emf = (-8 * MU0 * design.L * design.u * design.N_turns * A1
               * np.sinh(nk * design.h_c) / (nk * design.h_c * ws))
    left, right = _edge_phases(design, ns)
    motion = nk[None, :, None] * (design.u * ts + x_0)[None, None, :]
    dl = left[:, :, None] - motion
    dr = right[:, :, None] - motion
    linkage = np.einsum("h,mht->mt", amp_lam, np.sin(dr) - np.sin(dl))
    emf = np.einsum("h,mht->mt", amp_emf, np.cos(dl) - np.cos(dr))
    current = design.h_c * ws / design.N_turns * all_phase_currents(design, ts)
    return EmfResult(ts, linkage, emf, current)


def power_balance(design: MotorDesign, coeffs: FieldCoefficients,
                  x_0: float = 0.0, nt: int = 720) -> PowerBalance:
    """Check sum(E_m I_m) = u F_t over one electrical period."""
    if design.u == 0:
        raise ZeroVelocity("power balance needs a moving array (f > 0)")
    ts = np.arange(nt) / (nt * design.f)
    e = back_emf(design, coeffs, ts, x_0)
    electrical = (e.emf * e.current).sum(axis=0)
    mechanical = design.u * thrust(design, coeffs, ts, x_0).total
    scale = max(float(np.abs(mechanical).max()), 1e-30)
    dev = float(np.abs(electrical - mechanical).max()) / scale
    return PowerBalance(ts, electrical, mechanical, dev)


def emf_thd(design: MotorDesign, coeffs: FieldCoefficients, x_0: float = 0.0,
            nt: int = 720) -> np.ndarray:
    """Per-phase EMF total harmonic distortion over one period."""
    e = back_emf(design, coeffs, np.arange(nt) / (nt * design.f), x_0)
    spectrum = np.fft.rfft(e.emf, axis=1) / nt
    fund = np.abs(spectrum[:, 1])
    rest = np.sqrt((np.abs(spectrum[:, 2:]) ** 2).sum(axis=1))
    return rest / np.where(fund > 0, fund, np.inf)


def attraction_force(design: MotorDesign, coeffs: FieldCoefficients) -> float:
    """Per-side normal pull on the array, from the stress tensor at y = 0.

    B_y(x, 0) = -2 mu0 sum nk A1 sin nkx and the x-average of sin^2 gives
    F_y = 2 mu0 L (lambda/2) sum (nk A1)^2 per wavelength per side.
    """
    _, nk, A1 = _active(design, coeffs)
    return float(2 * MU0 * design.L * (design.lam / 2) * ((nk * A1) ** 2).sum())


def misalignment_force(design: MotorDesign,
                       trunc: HarmonicTruncation | None = None,
                       g_0: float | None = None) -> NormalForceResult:
    """Net pull on the stator when it sits g_0 off the sandwich midplane.

    Solves the two sides at gaps g -/+ g_0 separately; the net force points
    toward the smaller gap and vanishes at g_0 = 0.
    """
    g0 = design.g_0 if g_0 is None else float(g_0)
    if not 0 <= g0 < design.g:
        raise OffsetExceedsGap(g0, design.g)
    trunc = trunc or HarmonicTruncation()

    def per_side(d: MotorDesign) -> float:
        src = fourier_coefficients(d, trunc)
        return attraction_force(d, solve_coefficients(d, src))

    nominal = per_side(design.with_gap(design.g))
    small = per_side(design.with_gap(design.g - g0))
    large = per_side(design.with_gap(design.g + g0))
    return NormalForceResult(g0, nominal, small, large, small - large)
