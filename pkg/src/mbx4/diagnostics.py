"""Post-processing: pulse areas, total-area combinations, sech fits, peak tracking.

The pulse area is the coherent time integral of a Rabi envelope; what is
reported is its magnitude, so the diagnostic is invariant under a global
phase rotation of any channel and reduces to the usual signed integral
for real envelopes.  Magnitude areas (integral of |Omega|) are carried
alongside to expose phase effects in broadened runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import CHANNELS, DomainError, RetardedGrid

# FWHM of sech(x) is 2*acosh(2) widths
_SECH_FWHM = 2.0 * math.acosh(2.0)


@dataclass(frozen=True)
class AreaRecord:
    """Individual pulse areas at one depth plus the conserved totals.

    theta_1 = sqrt(theta_a^2 + theta_c^2), theta_2 = sqrt(theta_b^2 +
    theta_d^2) and theta_total = sqrt(theta_1^2 + theta_2^2) are filled
    by construction.  theta_abs_* are the magnitude areas.
    """

    z: float
    theta_a: float
    theta_b: float
    theta_c: float
    theta_d: float
    theta_1: float
    theta_2: float
    theta_total: float
    theta_abs_a: float
    theta_abs_b: float
    theta_abs_c: float
    theta_abs_d: float

    @classmethod
    def from_areas(cls, z, theta_a, theta_b, theta_c, theta_d, theta_abs=None):
        t1 = math.hypot(theta_a, theta_c)
        t2 = math.hypot(theta_b, theta_d)
        if theta_abs is None:
            theta_abs = (theta_a, theta_b, theta_c, theta_d)
        return cls(
            z=z,
            theta_a=theta_a, theta_b=theta_b, theta_c=theta_c, theta_d=theta_d,
            theta_1=t1, theta_2=t2, theta_total=math.hypot(t1, t2),
            theta_abs_a=theta_abs[0], theta_abs_b=theta_abs[1],
            theta_abs_c=theta_abs[2], theta_abs_d=theta_abs[3],
        )

    def thetas(self) -> np.ndarray:
        return np.array([self.theta_a, self.theta_b, self.theta_c, self.theta_d])


@dataclass(frozen=True)
class SechFit:
    """Least-squares fit of A*sech((t - center)/width) to an envelope."""

    amplitude: float
    width: float
    center: float
    rms_residual: float
    n_points: int

    @property
    def area(self) -> float:
        return math.pi * self.amplitude * self.width


def complex_pulse_area(envelope, grid: RetardedGrid) -> complex:
    """Trapezoid integral of a (possibly complex) envelope over the time grid."""
    envelope = np.asarray(envelope)
    if envelope.shape[-1] != grid.n_t:
        raise DomainError(
            f"envelope length {envelope.shape[-1]} does not match grid n_t {grid.n_t}")
    return complex(np.trapezoid(envelope, grid.t))


def pulse_area(envelope, grid: RetardedGrid) -> float:
    """Magnitude of the coherent pulse area (phase available via complex_pulse_area)."""
    return abs(complex_pulse_area(envelope, grid))


def magnitude_area(envelope, grid: RetardedGrid) -> float:
    return float(np.trapezoid(np.abs(envelope), grid.t))


def total_areas(z, theta_a, theta_b, theta_c, theta_d, theta_abs=None) -> AreaRecord:
    """Fill the quadrature-sum totals for four individual areas."""
    return AreaRecord.from_areas(z, theta_a, theta_b, theta_c, theta_d, theta_abs)


def snapshot_area_record(snapshot, grid: RetardedGrid) -> AreaRecord:
    """Area record (coherent and magnitude) for one field snapshot."""
    coh = [pulse_area(snapshot.omega[i], grid) for i in range(4)]
    mag = [magnitude_area(snapshot.omega[i], grid) for i in range(4)]
    return AreaRecord.from_areas(snapshot.z, *coh, theta_abs=tuple(mag))


def _sech_model(params, t):
    amp, center, width = params
    return amp / np.cosh(np.clip((t - center) / width, -700.0, 700.0))


def quadratic_peak(y, t):
    """Sub-grid peak location by parabolic interpolation around the discrete max.

    Returns (t_peak, amplitude).  Gives the raw grid point when the
    maximum sits on a boundary.
    """
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        return float(t[i]), float(y[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(t[i]), float(y1)
    shift = 0.5 * (y0 - y2) / denom
    dt = t[1] - t[0]
    return float(t[i] + shift * dt), float(y1 - 0.25 * (y0 - y2) * shift)


def _local_maxima(y):
    idx = np.where((y[1:-1] >= y[:-2]) & (y[1:-1] > y[2:]))[0] + 1
    return idx


def fit_sech(envelope, grid: RetardedGrid, mask_level=0.01, max_nfev=200) -> SechFit:
    """Fit a sech profile to |envelope| and report the relative RMS residual.

    The fit is initialized from the peak and FWHM, restricted to the
    region where the envelope exceeds ``mask_level`` of its peak, and the
    residual is normalized by the fitted amplitude (scale-free, so
    residuals are comparable across channels).  Inputs without a single
    dominant peak (second-largest local maximum above a fifth of the
    peak) are rejected.
    """
    t = grid.t
    y = np.abs(np.asarray(envelope))
    if y.shape != t.shape:
        raise DomainError("envelope does not match grid")
    peak = y.max()
    if peak <= 0.0:
        raise DomainError("cannot fit an all-zero envelope")
    maxima = _local_maxima(y)
    if len(maxima) > 1:
        heights = np.sort(y[maxima])[::-1]
        if heights[1] >= peak / 5.0:
            raise DomainError(
                f"multi-peak envelope: secondary maximum at {heights[1]:.3g} "
                f"vs peak {peak:.3g}")
    t_peak, amp0 = quadratic_peak(y, t)

    above = y >= 0.5 * peak
    fwhm = t[above][-1] - t[above][0] if above.sum() > 1 else 4.0 * grid.dt
    w0 = max(fwhm / _SECH_FWHM, grid.dt)

    mask = y >= mask_level * peak
    tm, ym = t[mask], y[mask]

    def residual(params):
        return (_sech_model(params, tm) - ym) / peak

    result = least_squares(
        residual, x0=[amp0, t_peak, w0],
        bounds=([0.0, t[0], 1e-12], [np.inf, t[-1], np.inf]),
        max_nfev=max_nfev,
    )
    if not result.success:
        raise DomainError(f"sech fit did not converge: {result.message}")
    amp, center, width = result.x
    model = _sech_model(result.x, tm)
    rms = float(np.sqrt(np.mean(((ym - model) / amp) ** 2)))
    return SechFit(amplitude=float(amp), width=float(width), center=float(center),
                   rms_residual=rms, n_points=int(mask.sum()))


@dataclass(frozen=True)
class PeakTrack:
    """Linear drift of one channel's peak time across its asymptotic window."""

    channel: str
    slope: float
    intercept: float
    z_window: tuple
    n_points: int


# Channels a, b enter the medium, c, d leave it; their asymptotic windows
# sit at opposite ends of the propagation range.
_INPUT_CHANNELS = ("a", "b")


def track_peaks(peak_z, peak_times, peak_amps, window_frac=0.2,
                noise_floor=0.01, min_points=10, channels=CHANNELS):
    """Per-channel drift rate dT/dZ from recorded peak positions.

    ``peak_z`` has shape (n,), ``peak_times``/``peak_amps`` shape (4, n).
    Input channels are fitted over the first ``window_frac`` of the depth
    range, output channels over the last.  Peaks below ``noise_floor`` of
    the global amplitude maximum are discarded; fewer than ``min_points``
    usable samples in a requested channel's window is an error.
    """
    peak_z = np.asarray(peak_z, dtype=float)
    peak_times = np.asarray(peak_times, dtype=float)
    peak_amps = np.asarray(peak_amps, dtype=float)
    z_lo, z_hi = peak_z.min(), peak_z.max()
    span = z_hi - z_lo
    global_max = peak_amps.max()
    tracks = {}
    for ch in channels:
        i = CHANNELS.index(ch)
        if ch in _INPUT_CHANNELS:
            in_window = peak_z <= z_lo + window_frac * span
        else:
            in_window = peak_z >= z_hi - window_frac * span
        usable = in_window & (peak_amps[i] >= noise_floor * global_max)
        if usable.sum() < min_points:
            raise DomainError(
                f"channel {ch}: only {int(usable.sum())} trackable peaks in its "
                f"window (need {min_points})")
        zw = peak_z[usable]
        slope, intercept = np.polyfit(zw, peak_times[i][usable], 1)
        tracks[ch] = PeakTrack(
            channel=ch, slope=float(slope), intercept=float(intercept),
            z_window=(float(zw.min()), float(zw.max())), n_points=int(usable.sum()))
    return tracks


def track_peaks_result(result, **kwargs):
    """track_peaks convenience for a PropagationResult-like object."""
    return track_peaks(result.peak_z, result.peak_times, result.peak_amps, **kwargs)


def lab_frame_width(retarded_width, drift_rate):
    """Spatial extent (units of c*t0) of a pulse along the lab coordinate.

    A profile f((T - a*Z)/w) in retarded coordinates occupies
    x-width = c*w/(1 + a) at fixed lab time, so slower pulses (larger
    drift rate a) look narrower on the lab axis.  Used when plotting
    retarded-frame snapshots against the medium's physical extent.
    """
    if not retarded_width > 0:
        raise DomainError(f"width must be positive, got {retarded_width}")
    return retarded_width / (1.0 + drift_rate)
