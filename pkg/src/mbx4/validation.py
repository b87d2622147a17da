"""Acceptance suite: every headline claim of the engine as a pass/fail check.

Each criterion is a function returning a CriterionResult with the
measured numbers in ``details``; the CLI ``validate`` subcommand and the
pytest acceptance module both run these.  Tolerances are pinned here and
nowhere else.  Heavy propagation runs are cached per process because two
criteria share the oracle round trip.
"""

from __future__ import annotations

import contextlib
import math
import os
import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import analytic, bloch, kernels, presets
from .analytic import SolitonParams, analytic_areas, analytic_fields, kappa_average
from .config import (build_grid, build_medium, build_pulses,
                     build_solver_config)
from .core import (FieldSnapshot, MediumSpec, PulseSpec, RetardedGrid,
                   initial_snapshot, make_seed_state,
                   validate_density_matrix)
from .diagnostics import fit_sech, pulse_area, snapshot_area_record, track_peaks
from .output import write_areas_csv
from .solver import SolverConfig, propagate

TWO_PI = 2.0 * math.pi


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: str
    runtime_s: float


@contextlib.contextmanager
def inject_kappa_fault(scale=1.02):
    """Deliberately corrupt the closed-form amplitude's kappa (tests only)."""
    previous = analytic._FAULT_KAPPA_SCALE
    analytic._FAULT_KAPPA_SCALE = scale
    try:
        yield
    finally:
        analytic._FAULT_KAPPA_SCALE = previous


def _params(u=math.pi / 4, alpha_sq=0.75, tau=1.0, mu=1.0, t2_star=None):
    kappa = kappa_average(mu, tau, t2_star)
    return SolitonParams(tau=tau, u=u, alpha_sq=alpha_sq,
                         beta_sq=1.0 - alpha_sq, kappa=kappa)


def _centered_grid(p, z, half_width=40.0, n_t=4096):
    center = analytic.peak_time(z, p)
    return RetardedGrid(t_min=center - half_width, t_max=center + half_width,
                        n_t=n_t, z_max=1.0, n_z=1)


def criterion_area_conservation() -> CriterionResult:
    """Closed-form and quadrature total areas pinned at 2*pi across depth."""
    start = time.perf_counter()
    p = _params()
    z_values = np.linspace(-50.0 / p.kappa, 50.0 / p.kappa, 500)

    closed_dev = max(abs(analytic_areas(z, p).theta_total - TWO_PI) / TWO_PI
                     for z in z_values)

    quad_dev = 0.0
    for z in z_values:
        grid = _centered_grid(p, z)
        snap = analytic_fields(z, grid, p)
        record = snapshot_area_record(snap, grid)
        quad_dev = max(quad_dev, abs(record.theta_total - TWO_PI) / TWO_PI)

    passed = closed_dev < 1e-12 and quad_dev < 1e-6
    details = (f"closed-form max|theta_T-2pi|/2pi = {closed_dev:.3e} (< 1e-12); "
               f"quadrature = {quad_dev:.3e} (< 1e-6)")
    return CriterionResult("analytic-area-conservation", passed, details,
                           time.perf_counter() - start)


def criterion_asymptotic_sech() -> CriterionResult:
    """Far from the transfer region every channel is a sech with the law's area."""
    start = time.perf_counter()
    worst_res = 0.0
    worst_area = 0.0
    for u in (math.pi / 6, math.pi / 4, math.pi / 3):
        p = _params(u=u)
        cases = [(-30.0 / p.kappa, 0, TWO_PI * math.sin(u)),
                 (-30.0 / p.kappa, 1, TWO_PI * math.cos(u)),
                 (+30.0 / p.kappa, 2, TWO_PI * math.sin(u)),
                 (+30.0 / p.kappa, 3, TWO_PI * math.cos(u))]
        for z, channel, target in cases:
            grid = _centered_grid(p, z)
            snap = analytic_fields(z, grid, p)
            fit = fit_sech(snap.omega[channel], grid)
            worst_res = max(worst_res, fit.rms_residual)
            worst_area = max(worst_area, abs(fit.area - target) / target)
    passed = worst_res < 1e-4 and worst_area < 1e-4
    details = (f"max sech-fit residual = {worst_res:.3e} (< 1e-4); "
               f"max fitted-area deviation = {worst_area:.3e} (< 1e-4)")
    return CriterionResult("asymptotic-sech-areas", passed, details,
                           time.perf_counter() - start)


def criterion_kappa_quadrature() -> CriterionResult:
    """Length-scale average: sharp-line limit and oracle agreement."""
    start = time.perf_counter()
    mu = tau = 1.0

    k_wide = kappa_average(mu, tau, 1e6 * tau)
    sharp_dev = abs(k_wide - mu * tau / 2.0) / (mu * tau / 2.0)

    # dense-trapezoid oracle, T2* = tau, 1e6 points over +-12/T2*
    t2 = tau
    delta = np.linspace(-12.0 / t2, 12.0 / t2, 1_000_000)
    f = (t2 / math.sqrt(2.0 * math.pi)) * np.exp(-(delta * t2) ** 2 / 2.0)
    oracle = (mu / (2.0 * tau)) * float(
        np.trapezoid(f / (delta ** 2 + 1.0 / tau ** 2), delta))
    k_prod = kappa_average(mu, tau, t2, n_nodes=64)
    oracle_dev = abs(k_prod - oracle) / oracle

    k_gh = kappa_average(mu, tau, t2, n_nodes=64, method="gauss_hermite")
    gh_dev = abs(k_gh - oracle) / oracle

    passed = sharp_dev < 1e-6 and oracle_dev < 1e-8
    details = (f"T2*=1e6 limit deviation = {sharp_dev:.3e} (< 1e-6); "
               f"kappa vs 1e6-point oracle = {oracle_dev:.3e} (< 1e-8); "
               f"[plain 64-node Gauss-Hermite rule would give {gh_dev:.3e}]")
    return CriterionResult("kappa-quadrature", passed, details,
                           time.perf_counter() - start)


def _two_level_medium(length):
    return MediumSpec(mu=1.0, t2_star=None, n_detuning=1,
                      alpha_sq=1.0, beta_sq=0.0, length=length)


@lru_cache(maxsize=None)
def _two_level_soliton_run():
    """2*pi sech, sharp line, through ten absorber lengths."""
    tau, mu = 1.0, 1.0
    kappa = mu * tau / 2.0
    z_max = 10.0 / kappa
    grid = RetardedGrid(t_min=-20.0, t_max=30.0, n_t=2560,
                        z_max=z_max, n_z=int(round(z_max / 0.01)))
    medium = _two_level_medium(z_max)
    pulse = PulseSpec(channel="a", shape="sech", area=2.0 * math.pi,
                      width=tau, center=0.0)
    initial = initial_snapshot([pulse], grid)
    result = propagate(initial, medium, grid, SolverConfig(snapshot_every=z_max / 8))
    return grid, result


@lru_cache(maxsize=None)
def _two_level_decay_run():
    """1*pi sech on a broadened two-level line (Beer-attenuation regime).

    The monotone area decay is a broadened-medium statement: with all
    atoms at line center nothing absorbs irreversibly and the coherent
    area of the ringing waveform oscillates instead of decaying.  The
    window is kept shorter than the discrete-ensemble recurrence time.
    """
    t2_star = 2.0
    z_max = 6.0
    grid = RetardedGrid(t_min=-15.0, t_max=15.0, n_t=1536,
                        z_max=z_max, n_z=int(round(z_max / 0.01)))
    medium = MediumSpec(mu=1.0, t2_star=t2_star, n_detuning=64,
                        alpha_sq=1.0, beta_sq=0.0, length=z_max)
    pulse = PulseSpec(channel="a", shape="sech", area=math.pi, width=1.0,
                      center=0.0)
    initial = initial_snapshot([pulse], grid)
    result = propagate(initial, medium, grid, SolverConfig(snapshot_every=z_max))
    return grid, result


def criterion_two_level_area_theorem() -> CriterionResult:
    """2*pi sech is shape-stable over ten absorber lengths; 1*pi attenuates."""
    start = time.perf_counter()
    grid, result = _two_level_soliton_run()
    final = result.snapshots[-1]
    area_end = result.area_records[-1].theta_a
    area_dev = abs(area_end - TWO_PI) / TWO_PI
    fit = fit_sech(final.omega[0], grid)

    _, decay = _two_level_decay_run()
    areas = np.array([r.theta_a for r in decay.area_records])
    monotone = bool(np.all(np.diff(areas) < 0.0))

    passed = area_dev < 0.005 and fit.rms_residual < 0.01 and monotone
    details = (f"2pi output area deviation = {area_dev:.3e} (< 5e-3); "
               f"sech residual = {fit.rms_residual:.3e} (< 1e-2); "
               f"1pi area strictly decreasing over {len(areas)} samples: {monotone} "
               f"(final {areas[-1] / math.pi:.3f} pi)")
    return CriterionResult("two-level-area-theorem", passed, details,
                           time.perf_counter() - start)


ROUNDTRIP_ENTRY_KAPPA_Z = -8.0


@lru_cache(maxsize=None)
def _roundtrip_run():
    """Closed-form fields injected at kappa*Z = -8, propagated 16/kappa."""
    p = _params()
    z_max = 16.0 / p.kappa
    grid = RetardedGrid(t_min=-40.0, t_max=40.0, n_t=4096,
                        z_max=z_max, n_z=int(round(z_max * p.kappa * 200)))
    medium = MediumSpec(mu=1.0, t2_star=None, n_detuning=1,
                        alpha_sq=p.alpha_sq, beta_sq=p.beta_sq, length=z_max)
    entry_z = ROUNDTRIP_ENTRY_KAPPA_Z / p.kappa
    initial = analytic_fields(entry_z, grid, p)
    initial = FieldSnapshot(z=0.0, omega=initial.omega)
    result = propagate(initial, medium, grid,
                       SolverConfig(snapshot_every=z_max / 32))
    return p, entry_z, grid, result


def criterion_solver_oracle_roundtrip() -> CriterionResult:
    """Numerical areas track the closed-form area laws through the transfer."""
    start = time.perf_counter()
    p, entry_z, grid, result = _roundtrip_run()

    worst_channel = 0.0
    worst_total = 0.0
    for record in result.area_records:
        reference = analytic_areas(entry_z + record.z, p)
        worst_channel = max(worst_channel, float(np.max(np.abs(
            record.thetas() - reference.thetas()))) / TWO_PI)
        worst_total = max(worst_total, abs(record.theta_total - TWO_PI) / TWO_PI)

    energy_drift = abs(result.energies[-1] - result.energies[0]) / result.energies[0]

    passed = worst_channel < 0.02 and worst_total < 0.01
    details = (f"max channel-area deviation = {worst_channel:.3e} of 2pi (< 2e-2); "
               f"max total-area deviation = {worst_total:.3e} (< 1e-2); "
               f"energy drift = {energy_drift:.3e}")
    return CriterionResult("solver-oracle-roundtrip", passed, details,
                           time.perf_counter() - start)


def criterion_group_velocity() -> CriterionResult:
    """Peak drift rates match the input/output group-velocity laws."""
    start = time.perf_counter()
    p, entry_z, grid, result = _roundtrip_run()
    tracks = track_peaks(result.peak_z, result.peak_times, result.peak_amps)
    drift_in = p.alpha_sq * p.kappa * p.tau
    drift_out = p.beta_sq * p.kappa * p.tau
    devs = {}
    for ch, target in (("a", drift_in), ("b", drift_in),
                       ("c", drift_out), ("d", drift_out)):
        devs[ch] = abs(tracks[ch].slope - target) / target
    worst = max(devs.values())
    passed = worst < 0.02
    details = ("slope deviations " +
               ", ".join(f"{ch}={v:.3e}" for ch, v in devs.items()) +
               " (< 2e-2)")
    return CriterionResult("group-velocity-law", passed, details,
                           time.perf_counter() - start)


@lru_cache(maxsize=None)
def _fig2_run():
    doc = presets.fig2_config()
    grid = build_grid(doc)
    medium = build_medium(doc, grid)
    pulses = build_pulses(doc)
    cfg = build_solver_config(doc)
    initial = initial_snapshot(pulses, grid)
    result = propagate(initial, medium, grid, cfg)
    return grid, result


def criterion_pulse_transfer() -> CriterionResult:
    """Square-Gaussian reproduction: totals lock to 2*pi, pairs transfer, sech out."""
    start = time.perf_counter()
    grid, result = _fig2_run()
    table = result.area_table()
    z = table[:, 0]
    theta_1, theta_2, theta_total = table[:, 5], table[:, 6], table[:, 7]

    initial_target = math.hypot(1.4, 0.9) * math.pi
    initial_dev = abs(theta_total[0] - initial_target) / initial_target

    running_max = np.maximum.accumulate(theta_total)
    ripple = float(np.max(running_max - theta_total)) / TWO_PI
    reached = np.abs(theta_total - TWO_PI) <= 0.02 * TWO_PI
    reached_before_end = bool(reached.any()) and z[np.argmax(reached)] < z[-1]
    final_total_dev = abs(theta_total[-1] - TWO_PI) / TWO_PI

    if reached.any():
        formed = np.argmax(reached)
        t1w, t2w = theta_1[formed:], theta_2[formed:]
        pair_dev = max(float(np.ptp(t1w) / np.mean(t1w)),
                       float(np.ptp(t2w) / np.mean(t2w)))
    else:
        pair_dev = math.inf

    final = result.snapshots[-1]
    fit_c = fit_sech(final.omega[2], grid)
    fit_d = fit_sech(final.omega[3], grid)
    u_eff = math.atan2(theta_1[-1], theta_2[-1])
    out_dev = max(
        abs(result.area_records[-1].theta_c - TWO_PI * math.sin(u_eff))
        / (TWO_PI * math.sin(u_eff)),
        abs(result.area_records[-1].theta_d - TWO_PI * math.cos(u_eff))
        / (TWO_PI * math.cos(u_eff)))

    passed = (initial_dev < 0.01 and ripple < 0.005 and reached_before_end
              and final_total_dev < 0.02 and pair_dev < 0.03
              and fit_c.rms_residual < 0.02 and fit_d.rms_residual < 0.02
              and out_dev < 0.05)
    details = (f"initial theta_T dev = {initial_dev:.3e} (< 1e-2); "
               f"ripple = {ripple:.3e} (< 5e-3); "
               f"reached 2pi+-2% before z_max: {reached_before_end}; "
               f"final theta_T dev = {final_total_dev:.3e} (< 2e-2); "
               f"theta_1/theta_2 spread after formation = {pair_dev:.3e} (< 3e-2); "
               f"output sech residuals c={fit_c.rms_residual:.3e}, "
               f"d={fit_d.rms_residual:.3e} (< 2e-2); "
               f"output areas vs 2pi sin/cos(u_eff) dev = {out_dev:.3e} (< 5e-2)")
    return CriterionResult("pulse-transfer-reproduction", passed, details,
                           time.perf_counter() - start)


def _smooth_test_fields(n_t, amplitude=1.0, seed=7):
    """Random smooth profiles with no exact zeros (so no column is skipped)."""
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n_t)
    omega = np.zeros((4, n_t), dtype=np.complex128)
    for ch in range(4):
        y = np.full(n_t, 0.05 * math.cos(0.3 * ch))
        for harmonic in range(1, 4):
            y += rng.normal() * np.sin(math.pi * harmonic * x + rng.uniform(0.1, math.pi))
        omega[ch] = amplitude * y / max(1e-12, np.abs(y).max())
    return omega


def criterion_invariant_suites() -> CriterionResult:
    """Density-matrix bounds, RK4 order, Heun convergence, determinism."""
    start = time.perf_counter()
    failures = []
    notes = []

    # long integration keeps the state physical (trace, Hermiticity,
    # population and positivity bounds; purity has its own scale-pinned
    # test in the bloch suite since RK4 non-unitarity accumulates here)
    n_steps = 100_000
    omega = _smooth_test_fields(n_steps + 1, amplitude=1.0, seed=3)
    dt = 0.1  # dt * |Omega|max = 0.1
    rho0 = make_seed_state(0.75, 0.25)
    nodes = np.array([0.3])
    weights = np.array([1.0])
    _, states = kernels.sweep_coherences(omega, nodes, weights, rho0, dt)
    rho_end = states[0]
    trace_err = abs(rho_end.trace() - 1.0)
    try:
        validate_density_matrix(rho_end, herm_tol=1e-12, trace_tol=1e-10,
                                pop_tol=1e-8, eig_tol=1e-8)
    except Exception as exc:  # noqa: BLE001 - report, don't crash the suite
        failures.append(f"state invariants: {exc}")
    if trace_err > 1e-10:
        failures.append(f"trace drift {trace_err:.3e} > 1e-10")
    notes.append(f"trace drift {trace_err:.3e} after {n_steps} RK4 steps")

    # empirical RK4 order on a smooth profile
    ratio = _rk4_halving_ratio()
    if ratio < 14.0:
        failures.append(f"RK4 halving ratio {ratio:.1f} < 14")
    notes.append(f"RK4 halving ratio {ratio:.1f} (order {math.log2(ratio):.2f})")

    # Heun at dz beats Euler at dz/4
    err_heun, err_euler = _heun_vs_euler()
    if not err_heun < err_euler:
        failures.append(
            f"Heun error {err_heun:.3e} not below Euler-at-dz/4 {err_euler:.3e}")
    notes.append(f"Heun {err_heun:.3e} vs Euler@dz/4 {err_euler:.3e}")

    # bit-identical rerun
    if not _deterministic_rerun():
        failures.append("areas.csv differed between identical reruns")
    notes.append("rerun byte-identical")

    return CriterionResult("invariant-suites", not failures,
                           "; ".join(failures + notes) if failures
                           else "; ".join(notes),
                           time.perf_counter() - start)


def _rk4_halving_ratio():
    rho0 = make_seed_state(1.0, 0.0)
    nodes = np.array([0.4])
    weights = np.array([1.0])
    span = 8.0
    reference = None
    ends = {}
    base = 128
    fine = _smooth_test_fields(64 * base + 1, amplitude=1.0, seed=11)
    for factor in (1, 2, 64):
        n_steps = factor * base
        omega = fine[:, ::64 // factor]
        dt = span / n_steps
        _, states = kernels.sweep_coherences(omega, nodes, weights, rho0, dt)
        ends[factor] = states[0]
    e1 = np.abs(ends[1] - ends[64]).max()
    e2 = np.abs(ends[2] - ends[64]).max()
    return float(e1 / e2)


def _heun_vs_euler():
    tau = 1.0
    kappa = 0.5
    z_max = 2.0 / kappa
    grid_nz = 40
    grid = RetardedGrid(t_min=-20.0, t_max=24.0, n_t=1024,
                        z_max=z_max, n_z=grid_nz)
    medium = _two_level_medium(z_max)
    pulse = PulseSpec(channel="a", shape="sech", area=TWO_PI, width=tau,
                      center=0.0)
    initial = initial_snapshot([pulse], grid)

    def run(scheme, refine):
        g = RetardedGrid(t_min=grid.t_min, t_max=grid.t_max, n_t=grid.n_t,
                         z_max=z_max, n_z=grid_nz * refine)
        return propagate(initial, medium, g,
                         SolverConfig(scheme=scheme, snapshot_every=z_max)
                         ).snapshots[-1].omega

    reference = run("heun", 64)
    err_heun = float(np.abs(run("heun", 1) - reference).max())
    err_euler = float(np.abs(run("euler", 4) - reference).max())
    return err_heun, err_euler


def _deterministic_rerun():
    doc = presets.fig2_config()
    grid = RetardedGrid(t_min=-15.0, t_max=17.0, n_t=512, z_max=2.0, n_z=40)
    medium = MediumSpec(mu=1.0, t2_star=5.0, n_detuning=8,
                        alpha_sq=0.75, beta_sq=0.25, length=2.0)
    pulses = build_pulses(doc)
    initial = initial_snapshot(pulses, grid)

    blobs = []
    for _ in range(2):
        result = propagate(initial, medium, grid, SolverConfig(snapshot_every=1.0))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "areas.csv")
            write_areas_csv(path, result.area_records, result.energies)
            with open(path, "rb") as fh:
                blobs.append(fh.read())
    return blobs[0] == blobs[1]


CRITERIA = (
    ("analytic-area-conservation", criterion_area_conservation),
    ("asymptotic-sech-areas", criterion_asymptotic_sech),
    ("kappa-quadrature", criterion_kappa_quadrature),
    ("two-level-area-theorem", criterion_two_level_area_theorem),
    ("solver-oracle-roundtrip", criterion_solver_oracle_roundtrip),
    ("pulse-transfer-reproduction", criterion_pulse_transfer),
    ("group-velocity-law", criterion_group_velocity),
    ("invariant-suites", criterion_invariant_suites),
)

CRITERION_NAMES = tuple(name for name, _ in CRITERIA)


def run_criterion(name, fault=None) -> CriterionResult:
    table = dict(CRITERIA)
    if name not in table:
        raise KeyError(f"unknown criterion {name!r}")
    if fault == "kappa":
        with inject_kappa_fault():
            return table[name]()
    return table[name]()


def run_all(names=None, fault=None):
    selected = CRITERION_NAMES if names is None else tuple(names)
    return [run_criterion(name, fault=fault) for name in selected]
