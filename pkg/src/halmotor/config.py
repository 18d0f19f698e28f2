"""Machine description, operating point, and config file parsing.

Geometry convention: x runs along the direction of travel, y across the
airgap.  y = 0 is one stator face, the coil band occupies [0, h_c], the
airgap clearance [h_c, g_e] with g_e = h_c + g, and the magnet array
[g_e, g_e + h_m].  The machine is symmetric about the array mid-plane, so
one side is solved and per-side results are doubled where appropriate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidMagnetCount,
    MissingKey,
    NonPositiveLength,
    OffsetExceedsGap,
    UnknownKey,
    UnsupportedPhaseCount,
)

MU0 = 4e-7 * math.pi

# Slot filling order: (sign, phase index j) per slot across one pole pitch.
# The current density in slot m is sign * J cos(w t - (j - 1) 2 pi / N_ph + phi_0);
# the second pole pitch carries the return conductors with opposite sign.
_SLOT_PATTERN = {
    3: ((1, 1), (-1, 3), (1, 2)),
    5: ((1, 1), (-1, 4), (1, 2), (-1, 5), (1, 3)),
}


@dataclass(frozen=True)
class MotorDesign:
    """Geometry, material, and excitation parameters for one machine.

    Lengths in m, remanence in T, current density in A/m^2, frequency in Hz.
    `L` is the active depth of the modelled unit (into the page).
    """

    lam: float                 # spatial period (pole-pair pitch)
    g: float                   # mechanical clearance between coil band and magnets
    h_c: float                 # coil band height
    h_m: float                 # magnet height
    L: float                   # active depth
    N_m: int                   # magnets per pole
    N_ph: int = 3              # phases (3 or 5)
    back_iron: bool = False
    B_r: float = 1.1           # remanence
    J_max: float = 1e7         # peak current density
    f: float = 50.0            # electrical frequency
    phi_0: float = 0.0         # current phase offset
    N_turns: int = 100         # turns per coil
    rho_pm: float = 7000.0     # magnet density, kg/m^3
    rho_cu: float = 9000.0     # conductor density (incl. fill), kg/m^3
    sigma_cu: float = 5.8e7    # conductor conductivity, S/m
    g_0: float = 0.0           # static gap offset of the mover

    def __post_init__(self):
        for name in ("lam", "g", "h_c", "h_m", "L"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise NonPositiveLength(name, v)
        if not isinstance(self.N_m, int) or self.N_m < 2:
            raise InvalidMagnetCount(self.N_m)
        if self.N_ph not in (3, 5):
            raise UnsupportedPhaseCount(self.N_ph)
        if not (0 <= self.g_0 < self.g):
            raise OffsetExceedsGap(self.g_0, self.g)
        for name in ("B_r", "J_max", "f"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")
        if self.B_r == 0:
            raise ValueError("remanence must be positive")

    # derived, read-only
    @property
    def k(self) -> float:
        """Fundamental wavenumber 2 pi / lam."""
        return 2 * math.pi / self.lam

    @property
    def tau_p(self) -> float:
        """Pole pitch lam / 2."""
        return self.lam / 2

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.f

    @property
    def M(self) -> float:
        """Magnetization magnitude B_r / mu_0."""
        return self.B_r / MU0

    @property
    def g_e(self) -> float:
        """Electromagnetic airgap h_c + g (coil band plus clearance)."""
        return self.h_c + self.g

    @property
    def u(self) -> float:
        """Synchronous speed f * lam."""
        return self.f * self.lam

    @property
    def w_m(self) -> float:
        """Magnet width (lam / 2) / N_m."""
        return self.tau_p / self.N_m

    @property
    def dtheta(self) -> float:
        """Magnetization rotation step between adjacent magnets, pi / N_m."""
        return math.pi / self.N_m

    @property
    def slot_width(self) -> float:
        """Coil-side width (lam / 2) / N_ph."""
        return self.tau_p / self.N_ph

    def with_gap(self, g: float) -> "MotorDesign":
        return replace(self, g=g, g_0=0.0)


@dataclass(frozen=True)
class OperatingPoint:
    """Alignment and speed at which time series are evaluated."""

    t: float = 0.0
    x_0: float = 0.0           # mover position offset at t = 0
    u_override: float | None = None

    def speed(self, design: MotorDesign) -> float:
        return design.u if self.u_override is None else self.u_override


@dataclass(frozen=True)
class HarmonicTruncation:
    """Odd-harmonic cutoff: harmonics 1, 3, ..., n_max are retained."""

    n_max: int = 199

    def __post_init__(self):
        if not isinstance(self.n_max, int) or self.n_max < 1 or self.n_max % 2 == 0:
            raise ValueError(f"n_max must be an odd integer >= 1, got {self.n_max!r}")

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1, 2)


# config-file vocabulary: key -> (attribute, parser, required)
def _as_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


_CONFIG_KEYS: dict[str, tuple[str, object, bool]] = {
    "lambda_m": ("lam", float, True),
    "gap_m": ("g", float, True),
    "coil_height_m": ("h_c", float, True),
    "pm_height_m": ("h_m", float, True),
    "depth_m": ("L", float, True),
    "n_magnets_per_pole": ("N_m", int, True),
    "n_phases": ("N_ph", int, True),
    "back_iron": ("back_iron", _as_bool, True),
    "remanence_T": ("B_r", float, True),
    "j_max_A_per_m2": ("J_max", float, True),
    "frequency_Hz": ("f", float, True),
    "phi0_rad": ("phi_0", float, False),
    "turns_per_coil": ("N_turns", int, False),
    "rho_pm_kg_m3": ("rho_pm", float, False),
    "rho_cu_kg_m3": ("rho_cu", float, False),
    "sigma_cu_S_m": ("sigma_cu", float, False),
    "gap_offset_m": ("g_0", float, False),
}

# n_max_harmonic is handled alongside the design keys but feeds the
# truncation, not the MotorDesign.
_TRUNC_KEY = "n_max_harmonic"


def load_design(path) -> tuple[MotorDesign, HarmonicTruncation]:
    """Parse a `key = value` config file.

    Blank lines and `#` comments are ignored.  Unknown keys are rejected so
    that typos do not silently fall back to defaults.
    """
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {body!r}")
            key, _, val = body.partition("=")
            key = key.strip()
            if key in raw:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = val.strip()

    for key in raw:
        if key not in _CONFIG_KEYS and key != _TRUNC_KEY:
            raise UnknownKey(key)

    kwargs = {}
    for key, (attr, parse, required) in _CONFIG_KEYS.items():
        if key in raw:
            try:
                kwargs[attr] = parse(raw[key])
            except ValueError as exc:
                raise ValueError(f"config key {key!r}: {exc}") from exc
        elif required:
            raise MissingKey(key)

    n_max = int(raw[_TRUNC_KEY]) if _TRUNC_KEY in raw else 199
    return MotorDesign(**kwargs), HarmonicTruncation(n_max)


def phase_current_density(design: MotorDesign, m: int, t) -> np.ndarray | float:
    """Current density J_m(t) in slot m (1-based across one pole pitch)."""
    if not 1 <= m <= design.N_ph:
        raise IndexOutOfRange("slot", m, design.N_ph)
    sign, j = _SLOT_PATTERN[design.N_ph][m - 1]
    t = np.asarray(t, dtype=float)
    out = sign * design.J_max * np.cos(
        design.omega * t - (j - 1) * 2 * math.pi / design.N_ph + design.phi_0)
    return out if out.ndim else float(out)


def all_phase_currents(design: MotorDesign, t: np.ndarray) -> np.ndarray:
    """J_m(t) for every slot, shape (N_ph, len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.stack([phase_current_density(design, m, t) for m in range(1, design.N_ph + 1)])


def slot_bounds(design: MotorDesign, m: int) -> tuple[float, float]:
    """x-extent of coil side m in the first pole pitch.

    Side m is centred at (m - 1) lam / (2 N_ph); side 1 straddles x = 0 and
    wraps around the period.  The return side sits half a period away with
    opposite sign.
    """
    if not 1 <= m <= design.N_ph:
        raise IndexOutOfRange("slot", m, design.N_ph)
    w = design.slot_width
    return (m - 1.5) * w, (m - 0.5) * w
