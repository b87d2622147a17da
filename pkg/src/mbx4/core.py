"""Domain types, grids, the seed atomic state, and input-pulse synthesis.

Unit conventions
----------------
All quantities are dimensionless.  Times are measured in a reference time
t0 (closed-form runs choose t0 equal to the nominal pulse width), Rabi
frequencies in rad/t0, and the propagation coordinate Z in units of
1/(mu*t0) so the coupling constant mu carries the whole interaction
scale.  The retarded frame (T = t - x/c, Z = x/c) sets c = 1, so Z is a
pure propagation depth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

CHANNELS = ("a", "b", "c", "d")
PULSE_SHAPES = ("sech", "gaussian", "square_gaussian")

# Total analytic area of each unit-amplitude, unit-width shape.
_UNIT_SHAPE_AREA = {
    "sech": math.pi,
    "gaussian": math.sqrt(math.pi),
    "square_gaussian": 2.0 * math.gamma(1.25),
}

# Fraction of a pulse's analytic area that must lie inside the time grid.
# Area diagnostics are the point of the artifact; silently truncated
# pulses would corrupt them, so clipping beyond this is a hard error.
MIN_CONTAINED_AREA = 0.999


class SchemaError(Exception):
    """A configuration document is structurally invalid."""


class DomainError(ValueError):
    """A parameter value lies outside its physical domain."""


@dataclass(frozen=True)
class RetardedGrid:
    """Uniform retarded-time x propagation-depth grid.

    The time axis spans [t_min, t_max] with n_t samples; the depth axis
    spans [0, z_max] with n_z steps (n_z + 1 levels).
    """

    t_min: float
    t_max: float
    n_t: int
    z_max: float
    n_z: int

    def __post_init__(self):
        if self.n_t < 2:
            raise DomainError(f"n_t must be >= 2, got {self.n_t}")
        if self.n_z < 1:
            raise DomainError(f"n_z must be >= 1, got {self.n_z}")
        if not self.t_max > self.t_min:
            raise DomainError(
                f"t_max must exceed t_min, got [{self.t_min}, {self.t_max}]"
            )
        if not self.z_max > 0:
            raise DomainError(f"z_max must be positive, got {self.z_max}")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    @property
    def dz(self) -> float:
        return self.z_max / self.n_z

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.n_z + 1)


@dataclass
class FieldSnapshot:
    """Four complex Rabi-frequency envelopes sampled on the time grid at fixed z.

    ``omega`` has shape (4, n_t) with channel order (a, b, c, d).
    """

    z: float
    omega: np.ndarray

    def __post_init__(self):
        om = np.ascontiguousarray(self.omega, dtype=np.complex128)
        if om.ndim != 2 or om.shape[0] != 4:
            raise DomainError(f"omega must have shape (4, n_t), got {om.shape}")
        self.omega = om

    @property
    def n_t(self) -> int:
        return self.omega.shape[1]

    @property
    def omega_a(self) -> np.ndarray:
        return self.omega[0]

    @property
    def omega_b(self) -> np.ndarray:
        return self.omega[1]

    @property
    def omega_c(self) -> np.ndarray:
        return self.omega[2]

    @property
    def omega_d(self) -> np.ndarray:
        return self.omega[3]

    def require_finite(self):
        if not np.isfinite(self.omega).all():
            bad = np.argwhere(~np.isfinite(self.omega))
            ch, k = bad[0]
            raise DomainError(
                f"non-finite envelope at z={self.z}, channel "
                f"{CHANNELS[ch]}, time index {k}"
            )


@dataclass(frozen=True)
class MediumSpec:
    """Medium parameters shared by the solver and the closed-form oracle.

    ``t2_star`` is the inhomogeneous lifetime in t0 units; ``None`` is the
    sharp-line sentinel (all atoms exactly resonant, a single detuning
    node).  An explicit sentinel keeps the delta-distribution limit exact
    instead of approximating it with a huge lifetime.
    """

    mu: float
    t2_star: float | None
    n_detuning: int
    alpha_sq: float
    beta_sq: float
    length: float

    def __post_init__(self):
        # mu = 0 is legal: fields free-stream in the retarded frame
        if self.mu < 0:
            raise DomainError(f"mu must be nonnegative, got {self.mu}")
        if self.t2_star is not None and not self.t2_star > 0:
            raise DomainError(f"t2_star must be positive or None, got {self.t2_star}")
        if self.n_detuning < 1:
            raise DomainError(f"n_detuning must be >= 1, got {self.n_detuning}")
        if self.sharp_line and self.n_detuning != 1:
            raise DomainError(
                f"sharp-line medium requires exactly one detuning node, "
                f"got {self.n_detuning}"
            )
        _check_populations(self.alpha_sq, self.beta_sq)
        if not self.length > 0:
            raise DomainError(f"length must be positive, got {self.length}")

    @property
    def sharp_line(self) -> bool:
        return self.t2_star is None


@dataclass(frozen=True)
class PulseSpec:
    """Input pulse: shape, target area (rad), width and center (t0 units)."""

    channel: str
    shape: str
    area: float
    width: float
    center: float

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise DomainError(f"unknown channel {self.channel!r}, expected one of {CHANNELS}")
        if self.shape not in PULSE_SHAPES:
            raise DomainError(f"unsupported pulse shape {self.shape!r}, expected one of {PULSE_SHAPES}")
        if not self.width > 0:
            raise DomainError(f"width must be positive, got {self.width}")
        if self.area < 0:
            raise DomainError(f"area must be nonnegative, got {self.area}")


def _check_populations(alpha_sq, beta_sq):
    for name, v in (("alpha_sq", alpha_sq), ("beta_sq", beta_sq)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v}")
    if abs(alpha_sq + beta_sq - 1.0) > 1e-12:
        raise DomainError(
            f"seed populations must sum to 1, got {alpha_sq} + {beta_sq} "
            f"= {alpha_sq + beta_sq}"
        )


def make_seed_state(alpha_sq: float, beta_sq: float) -> np.ndarray:
    """Mixed seed state: populations (alpha_sq, beta_sq, 0, 0), no coherences.

    This is the zero-field exact solution from which the soliton family
    is generated; every detuning node starts here at the earliest
    retarded time.
    """
    _check_populations(alpha_sq, beta_sq)
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = alpha_sq
    rho[1, 1] = beta_sq
    return rho


def validate_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-10,
                            pop_tol=1e-10, eig_tol=1e-8):
    """Check the physicality invariants of a 4x4 density matrix.

    Raises DomainError naming the first violated invariant; intended for
    tests and post-run audits, not the hot loop.
    """
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > herm_tol:
        raise DomainError(f"Hermiticity violated: max |rho - rho^dag| = {herm:.3e}")
    tr = rho.trace()
    if abs(tr - 1.0) > trace_tol:
        raise DomainError(f"trace violated: tr rho = {tr}")
    diag = np.diag(rho)
    if np.abs(diag.imag).max() > pop_tol:
        raise DomainError("populations must be real")
    if diag.real.min() < -pop_tol or diag.real.max() > 1.0 + pop_tol:
        raise DomainError(f"population out of [0, 1]: {diag.real}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < -eig_tol:
        raise DomainError(f"not positive semidefinite: min eigenvalue {w.min():.3e}")


def _unit_shape(shape: str, x: np.ndarray) -> np.ndarray:
    if shape == "sech":
        return 1.0 / np.cosh(np.clip(x, -700.0, 700.0))
    if shape == "gaussian":
        return np.exp(-(x ** 2))
    if shape == "square_gaussian":
        return np.exp(-(x ** 4))
    raise DomainError(f"unsupported pulse shape {shape!r}")


def generate_pulse(spec: PulseSpec, grid: RetardedGrid) -> np.ndarray:
    """Synthesize a real input envelope whose discrete trapezoid area equals spec.area.

    The amplitude is derived from the requested area on the actual grid,
    so trapezoid integration of the returned samples reproduces
    ``spec.area`` to rounding.  A pulse whose analytic area is not at
    least 99.9% contained in [t_min, t_max] is rejected; a peak closer
    than four widths to either grid edge only warns.
    """
    t = grid.t
    if spec.center - grid.t_min < 4 * spec.width or grid.t_max - spec.center < 4 * spec.width:
        warnings.warn(
            f"pulse on channel {spec.channel} is centered within four widths "
            f"of a grid edge", stacklevel=2)
    y = _unit_shape(spec.shape, (t - spec.center) / spec.width)
    # flush denormal-range tail samples: keeps area-scaling exactly linear
    # and lets the sweep kernels skip genuinely empty leading columns
    y[y < 1e-290] = 0.0
    if spec.area == 0.0:
        return np.zeros_like(t)
    on_grid = float(np.trapezoid(y, t))
    total = spec.width * _UNIT_SHAPE_AREA[spec.shape]
    contained = on_grid / total
    if contained < MIN_CONTAINED_AREA:
        raise DomainError(
            f"pulse on channel {spec.channel} carries only {contained:.4%} of its "
            f"area inside the grid (minimum {MIN_CONTAINED_AREA:.1%})"
        )
    return (spec.area / on_grid) * y


def initial_snapshot(pulses, grid: RetardedGrid) -> FieldSnapshot:
    """Sum the configured input pulses into the z = 0 boundary snapshot."""
    omega = np.zeros((4, grid.n_t), dtype=np.complex128)
    for spec in pulses:
        omega[CHANNELS.index(spec.channel)] += generate_pulse(spec, grid)
    return FieldSnapshot(z=0.0, omega=omega)
