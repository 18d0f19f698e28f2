"""Per-harmonic boundary-value solution of the hybrid scalar-potential model.

For each odd harmonic n the field in the three regions is

    region I   (0 <= y < g_e)          psi = (A1 e^{nky} + B1 e^{-nky}) sin nkx
    region II  (g_e <= y <= g_e + h_m) psi = (A2 e^{nky} + B2 e^{-nky}) sin nkx
    region III (above the array)       psi = B3 e^{-nky} sin nkx

with H = -grad psi.  The array enters through sheet sources on its two
faces, so region II carries no volume term; its potential reproduces B_x
and H_y directly, while H_x and B_y need the truncated magnetization added
back (see `evaluate_fields`).

The per-harmonic conditions (stator face, then the two array faces):

    A1 + B1 = 0
    (A1 - A2) e^a - (B1 - B2) e^-a =  sigma_n / (mu0 n k)     H_y jump at g_e
    (A2 - A1) e^a + (B2 - B1) e^-a =  k_n / (n k)             H_x jump at g_e
    A2 e^b - B2 e^-b + B3 e^-b     = -sigma_n / (mu0 n k)     H_y jump at top
    -A2 e^b - B2 e^-b + B3 e^-b    = -k_n / (n k)             H_x jump at top

with a = n k g_e, b = n k (g_e + h_m).  With back iron the top face is an
iron equipotential and the last two rows collapse to

    -A2 e^b - B2 e^-b = -k_n / (n k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import MU0, MotorDesign
from .errors import OutOfDomain, SingularSystem
from .halbach import HarmonicSource

# Harmonics whose exponent nk(g_e+h_m) exceeds this cap are dropped: their
# raw matrix entries overflow float64 while their airgap contribution
# carries a factor below 1e-100.  Dropping them is exact at double
# precision.
EXPONENT_CAP = 600.0

_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class FieldCoefficients:
    """Solved per-harmonic coefficients for one model and topology.

    `B3` is None for the back-iron topology (region III does not exist).
    Harmonics beyond the overflow cap are present with zero coefficients;
    the leading `n_active` entries are the solved ones.
    """

    model: str
    back_iron: bool
    n: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray
    B3: np.ndarray | None
    n_active: int

    def stack(self) -> np.ndarray:
        cols = [self.A1, self.B1, self.A2, self.B2]
        if self.B3 is not None:
            cols.append(self.B3)
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class FieldSample:
    """Field quantities at one point.

    psi is the scalar potential (A), A_z the vector potential (Wb/m); each
    is None for models that do not define it.
    """

    x: float
    y: float
    region: str
    B_x: float
    B_y: float
    H_x: float
    H_y: float
    psi: float | None
    A_z: float | None


def assemble_system(design: MotorDesign, source: HarmonicSource,
                    n: int) -> tuple[np.ndarray, np.ndarray]:
    """Raw boundary matrix and right-hand side for one harmonic.

    Returned without scaling, exactly as written in the module docstring.
    Prefer `solve_coefficients` for actual solving; it equilibrates the
    columns before factorization, which matters for high harmonics.
    """
    i = np.nonzero(source.n == n)[0]
    if len(i) != 1:
        raise ValueError(f"harmonic {n} not present in source")
    kn = float(source.k_n[i[0]])
    sn = float(source.sigma_n[i[0]])
    nk = n * design.k
    a = nk * design.g_e
    b = nk * (design.g_e + design.h_m)
    ea, ema, eb, emb = math.exp(a), math.exp(-a), math.exp(b), math.exp(-b)
    S = sn / (MU0 * nk)
    K = kn / nk
    if design.back_iron:
        A = np.array([
            [1.0, 1.0, 0.0, 0.0],
            [ea, -ema, -ea, ema],
            [-ea, -ema, ea, ema],
            [0.0, 0.0, -eb, -emb],
        ])
        rhs = np.array([0.0, S, K, -K])
    else:
        A = np.array([
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [ea, -ema, -ea, ema, 0.0],
            [-ea, -ema, ea, ema, 0.0],
            [0.0, 0.0, eb, -emb, emb],
            [0.0, 0.0, -eb, -emb, emb],
        ])
        rhs = np.array([0.0, S, K, -S, -K])
    return A, rhs


def _scaled_system(design: MotorDesign, nk: np.ndarray, S: np.ndarray,
                   K: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-equilibrated batch of the boundary systems.

    With unknowns rescaled as (A1, B1, A2, B2, B3) =
    diag(e^-a, 1, e^-b, e^a, e^b) x every matrix entry lands in [-1, 1]
    whatever the harmonic order, so the batched dense solve stays well
    conditioned up to the overflow cap.
    """
    a = nk * design.g_e
    ema = np.exp(-a)
    emd = np.exp(-nk * design.h_m)
    H = len(nk)
    z = np.zeros(H)
    o = np.ones(H)
    if design.back_iron:
        A = np.stack([
            np.stack([ema, o, z, z], axis=1),
            np.stack([o, -ema, -emd, o], axis=1),
            np.stack([-o, -ema, emd, o], axis=1),
            np.stack([z, z, -o, -emd], axis=1),
        ], axis=1)
        rhs = np.stack([z, S, K, -K], axis=1)
        scales = np.stack([ema, o, ema * emd, np.exp(a)], axis=1)
    else:
        A = np.stack([
            np.stack([ema, o, z, z, z], axis=1),
            np.stack([o, -ema, -emd, o, z], axis=1),
            np.stack([-o, -ema, emd, o, z], axis=1),
            np.stack([z, z, o, -emd, o], axis=1),
            np.stack([z, z, -o, -emd, o], axis=1),
        ], axis=1)
        rhs = np.stack([z, S, K, -S, -K], axis=1)
        b = nk * (design.g_e + design.h_m)
        scales = np.stack([ema, o, np.exp(-b), np.exp(a), np.exp(b)], axis=1)
    return A, rhs, scales


def _batch_solve(A: np.ndarray, rhs: np.ndarray, scales: np.ndarray) -> np.ndarray:
    try:
        x = np.linalg.solve(A, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    res = np.linalg.norm((A @ x[..., None])[..., 0] - rhs, axis=1)
    nb = np.linalg.norm(rhs, axis=1)
    live = nb > 0
    if np.any(res[live] > _RESIDUAL_TOL * nb[live]):
        worst = float((res[live] / nb[live]).max())
        raise SingularSystem(f"boundary solve residual {worst:.2e} exceeds contract")
    return scales * x


def _active_mask(design: MotorDesign, source: HarmonicSource) -> np.ndarray:
    nk = source.n * design.k
    mask = nk * (design.g_e + design.h_m) <= EXPONENT_CAP
    # orders are sorted ascending, so the mask is a prefix
    return mask


def _pack(design: MotorDesign, source: HarmonicSource, model: str,
          active: np.ndarray, cols: list[np.ndarray]) -> FieldCoefficients:
    ncol = len(cols)
    full = np.zeros((len(source.n), ncol))
    for j, c in enumerate(cols):
        full[active, j] = c
    return FieldCoefficients(
        model=model, back_iron=design.back_iron, n=source.n.copy(),
        A1=full[:, 0], B1=full[:, 1], A2=full[:, 2], B2=full[:, 3],
        B3=None if design.back_iron else full[:, 4],
        n_active=int(active.sum()))


def solve_coefficients(design: MotorDesign, source: HarmonicSource) -> FieldCoefficients:
    """Dense per-harmonic solve, the reference path for all field results."""
    active = _active_mask(design, source)
    nka = (source.n * design.k)[active]
    S = source.sigma_n[active] / (MU0 * nka)
    K = source.k_n[active] / nka
    A, rhs, scales = _scaled_system(design, nka, S, K)
    coeffs = _batch_solve(A, rhs, scales)
    return _pack(design, source, "laplace", active,
                 [coeffs[:, j] for j in range(coeffs.shape[1])])


def closed_form_coefficients(design: MotorDesign,
                             source: HarmonicSource) -> FieldCoefficients:
    """Closed-form solution of the same systems, kept as a cross-check."""
    active = _active_mask(design, source)
    nka = (source.n * design.k)[active]
    S = source.sigma_n[active] / (MU0 * nka)
    K = source.k_n[active] / nka
    a = nka * design.g_e
    b = nka * (design.g_e + design.h_m)
    if design.back_iron:
        denom = 2 * np.sinh(b)
        A1 = (S * np.sinh(nka * design.h_m) + K * (1 - np.cosh(nka * design.h_m))) / denom
        B1 = -A1
        A2 = -(S * np.exp(-b) * np.sinh(a) + K * (np.exp(-b) * np.cosh(a) - 1)) / denom
        B2 = (S * np.exp(b) * np.sinh(a) + K * (np.exp(b) * np.cosh(a) - 1)) / denom
        cols = [A1, B1, A2, B2]
    else:
        A1 = 0.5 * (S - K) * (np.exp(-a) - np.exp(-b))
        B1 = -A1
        A2 = -0.5 * (S - K) * np.exp(-b)
        B2 = 0.5 * K * (2 * np.cosh(a) - np.exp(-b)) + 0.5 * S * (2 * np.sinh(a) + np.exp(-b))
        B3 = S * (np.sinh(a) - np.sinh(b)) + K * (np.cosh(a) - np.cosh(b))
        cols = [A1, B1, A2, B2, B3]
    return _pack(design, source, "laplace", active, cols)


def classify_region(design: MotorDesign, y: float) -> str:
    top = design.g_e + design.h_m
    if y < 0:
        raise OutOfDomain("y", y, "below the stator face y = 0")
    if y < design.g_e:
        return "I"
    if y <= top:
        return "II"
    if design.back_iron:
        raise OutOfDomain("y", y, f"beyond the back iron at y = {top:g}")
    return "III"


def evaluate_fields(design: MotorDesign, source: HarmonicSource,
                    coeffs: FieldCoefficients, x: float, y: float,
                    region: str | None = None) -> FieldSample:
    """Physical B, H, and psi at one point.

    In region II the potential belongs to the sheet-source model: B_x and
    H_y follow from it directly, while H_x and B_y are completed with the
    truncated magnetization so the returned fields are the physical ones
    (H_x and B_y both continuous across the array faces).

    `region` forces a specific region's expansion, which is how the two
    one-sided limits at an interface are obtained.
    """
    if region is None:
        region = classify_region(design, y)
    act = slice(0, coeffs.n_active)
    nk = coeffs.n[act] * design.k
    s = np.sin(nk * x)
    c = np.cos(nk * x)
    if region == "I":
        ep, em = np.exp(nk * y), np.exp(-nk * y)
        A1, B1 = coeffs.A1[act], coeffs.B1[act]
        psi = float(((A1 * ep + B1 * em) * s).sum())
        hx = float((-nk * (A1 * ep + B1 * em) * c).sum())
        hy = float((-nk * (A1 * ep - B1 * em) * s).sum())
        return FieldSample(x, y, region, MU0 * hx, MU0 * hy, hx, hy, psi, None)
    if region == "II":
        ep, em = np.exp(nk * y), np.exp(-nk * y)
        A2, B2 = coeffs.A2[act], coeffs.B2[act]
        psi = float(((A2 * ep + B2 * em) * s).sum())
        hx_m = float((-nk * (A2 * ep + B2 * em) * c).sum())
        hy = float((-nk * (A2 * ep - B2 * em) * s).sum())
        Mx = float((source.M_xn[act] * c).sum())
        My = float((source.M_yn[act] * s).sum())
        return FieldSample(x, y, region,
                           MU0 * hx_m, MU0 * (hy + My), hx_m - Mx, hy, psi, None)
    B3 = coeffs.B3[act]
    em = np.exp(-nk * y)
    psi = float((B3 * em * s).sum())
    hx = float((-nk * B3 * em * c).sum())
    hy = float((nk * B3 * em * s).sum())
    return FieldSample(x, y, region, MU0 * hx, MU0 * hy, hx, hy, psi, None)


def airgap_B_y(design: MotorDesign, coeffs: FieldCoefficients,
               x: np.ndarray, y: float, shift: float = 0.0) -> np.ndarray:
    """Vectorized B_y in region I at height y with the mover shifted.

    Uses B1 = -A1: B_y = -2 mu0 sum nk A1 cosh(nk y) sin(nk (x - shift)).
    """
    if not 0 <= y <= design.g_e:
        raise OutOfDomain("y", y, "region I spans 0 <= y <= g_e")
    act = slice(0, coeffs.n_active)
    nk = coeffs.n[act] * design.k
    amp = -2 * MU0 * nk * coeffs.A1[act] * np.cosh(nk * y)
    return np.sin(np.outer(np.asarray(x, dtype=float) - shift, nk)) @ amp


def field_map(design: MotorDesign, source: HarmonicSource, coeffs: FieldCoefficients,
              xs: np.ndarray, ys: np.ndarray,
              evaluator=evaluate_fields) -> list[FieldSample]:
    """Row-major list of samples over the tensor grid ys x xs."""
    out = []
    for y in ys:
        for x in xs:
            out.append(evaluator(design, source, coeffs, float(x), float(y)))
    return out
