import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbx4.analytic import (GroupVelocities, SolitonParams, analytic_areas,
                           analytic_fields, channel_weights, fundamental_rabi,
                           group_velocities, kappa_average, peak_time, phi)
from mbx4.core import DomainError, RetardedGrid
from mbx4.diagnostics import pulse_area

TWO_PI = 2.0 * math.pi


def params(u=math.pi / 4, alpha_sq=0.75, tau=1.0, kappa=0.5):
    return SolitonParams(tau=tau, u=u, alpha_sq=alpha_sq,
                         beta_sq=1.0 - alpha_sq, kappa=kappa)


def centered_grid(p, z, half=40.0, n_t=4096):
    c = peak_time(z, p)
    return RetardedGrid(t_min=c - half, t_max=c + half, n_t=n_t, z_max=1.0,
                        n_z=1)


class TestKappaAverage:
    def test_sharp_line_exact(self):
        assert kappa_average(1.0, 1.0, None) == 0.5
        assert kappa_average(2.0, 3.0, None) == 3.0

    def test_wide_line_approaches_sharp_limit(self):
        k = kappa_average(1.0, 1.0, 1e6)
        assert abs(k - 0.5) / 0.5 < 1e-6

    def test_matches_dense_trapezoid_oracle(self):
        # oracle: 1e6-point trapezoid over +-12/T2*, frozen value guarded
        mu = tau = t2 = 1.0
        delta = np.linspace(-12.0, 12.0, 1_000_000)
        f = (t2 / math.sqrt(2 * math.pi)) * np.exp(-(delta * t2) ** 2 / 2)
        oracle = (mu / (2 * tau)) * np.trapezoid(
            f / (delta ** 2 + 1.0 / tau ** 2), delta)
        assert abs(oracle - 0.3278397712093991) < 1e-12
        k = kappa_average(mu, tau, t2, n_nodes=64)
        assert abs(k - oracle) / oracle < 1e-8

    def test_hermite_rule_converges_slowly(self):
        # the rational integrand defeats the plain quadrature at 64 nodes,
        # which is why the closed form is the production path
        oracle = 0.3278397712093991
        err64 = abs(kappa_average(1, 1, 1, 64, method="gauss_hermite") - oracle) / oracle
        err128 = abs(kappa_average(1, 1, 1, 128, method="gauss_hermite") - oracle) / oracle
        assert 1e-8 < err64 < 1e-5
        assert err128 < err64 / 10

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            kappa_average(-1.0, 1.0, None)
        with pytest.raises(DomainError):
            kappa_average(1.0, 1.0, -2.0)
        with pytest.raises(DomainError):
            kappa_average(1.0, 1.0, 1.0, method="simpson")


class TestPhi:
    def test_origin_is_quarter_pi(self):
        assert abs(phi(0.0, params()) - math.pi / 4) < 1e-15

    def test_extreme_depths_saturate(self):
        p = params(alpha_sq=1.0)
        assert 0.0 <= phi(1e6, p) < 1e-12
        assert 0.0 <= math.pi / 2 - phi(-1e6, p) < 1e-12
        assert math.isfinite(phi(1e305, p))

    def test_against_scalar_evaluation(self):
        p = params(alpha_sq=0.75, kappa=1.0)
        assert abs(phi(1.0, p) - math.atan(math.exp(-0.5))) < 1e-14

    @given(z=st.floats(-1e4, 1e4), alpha_sq=st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_always_in_open_quadrant(self, z, alpha_sq):
        value = phi(z, params(alpha_sq=alpha_sq))
        assert 0.0 <= value <= math.pi / 2
        assert math.isfinite(value)


def naive_fundamental(z, t, p):
    """Literal three-exponential form; overflows for large arguments."""
    kz = p.kappa * z
    aa, bb = p.alpha_sq, p.beta_sq
    num = (4.0 / p.tau) * math.sqrt(1.0 + math.exp(2 * (aa - bb) * kz))
    den = (2.0 * math.cosh(aa * kz - t / p.tau)
           + math.exp((aa - 2 * bb) * kz + t / p.tau))
    return num / den


class TestFundamentalRabi:
    def test_origin_value(self):
        p = params()
        assert abs(fundamental_rabi(0.0, 0.0, p) - 4 * math.sqrt(2) / 3) < 1e-12
        p2 = params(tau=2.0)
        assert abs(fundamental_rabi(0.0, 0.0, p2) - 2 * math.sqrt(2) / 3) < 1e-12

    def test_matches_literal_formula(self):
        rng = np.random.default_rng(5)
        p = params(alpha_sq=0.6, kappa=0.8, tau=1.3)
        for _ in range(50):
            z = rng.uniform(-20, 20)
            t = rng.uniform(-25, 25)
            ours = fundamental_rabi(z, t, p)
            ref = naive_fundamental(z, t, p)
            assert abs(ours - ref) < 1e-12 * max(ref, 1e-30)

    def test_regime_one_comoving_sech(self):
        p = params()
        kz = -40.0
        z = kz / p.kappa
        s = np.linspace(-8, 8, 41)
        t = (p.alpha_sq * kz + s) * p.tau
        values = fundamental_rabi(z, t, p)
        expected = (2.0 / p.tau) / np.cosh(s)
        assert np.max(np.abs(values - expected) / expected) < 1e-12

    def test_simulton_peak_constant(self):
        p = params(alpha_sq=0.5)
        for z in (-7.0, 0.0, 5.0):
            grid = centered_grid(p, z, half=30.0, n_t=2001)
            peak = fundamental_rabi(z, grid.t, p).max()
            assert abs(peak - 2.0 / p.tau) < 1e-10

    def test_overflow_safety(self):
        p = params()
        for kz in (-600.0, 600.0):
            for x in (-600.0, 600.0):
                value = fundamental_rabi(kz / p.kappa, x * p.tau, p)
                assert math.isfinite(value) and value >= 0.0

    @given(z=st.floats(-50, 50), t=st.floats(-50, 50),
           u=st.floats(0.0, math.pi / 2))
    @settings(max_examples=80, deadline=None)
    def test_pythagorean_channel_identity(self, z, t, u):
        p = params(u=u)
        w = channel_weights(z, p)
        om = fundamental_rabi(z, t, p)
        total = float(np.sum((w * om) ** 2))
        assert abs(total - om ** 2) <= 1e-13 * max(om ** 2, 1e-300)


class TestAnalyticFields:
    def test_u_extremes_kill_channel_pairs(self):
        grid = RetardedGrid(t_min=-10, t_max=10, n_t=201, z_max=1, n_z=1)
        snap = analytic_fields(0.5, grid, params(u=math.pi / 2))
        assert not snap.omega_b.any() and not snap.omega_d.any()
        assert snap.omega_a.any() and snap.omega_c.any()
        snap0 = analytic_fields(0.5, grid, params(u=0.0))
        assert not snap0.omega_a.any() and not snap0.omega_c.any()

    def test_envelopes_real_nonnegative(self):
        grid = RetardedGrid(t_min=-20, t_max=20, n_t=401, z_max=1, n_z=1)
        snap = analytic_fields(-3.0, grid, params(u=0.3))
        assert np.all(snap.omega.imag == 0)
        assert np.all(snap.omega.real >= 0)


class TestAnalyticAreas:
    @given(z=st.floats(-100, 100), u=st.floats(0.0, math.pi / 2))
    @settings(max_examples=60, deadline=None)
    def test_total_combinations(self, z, u):
        rec = analytic_areas(z, params(u=u))
        assert abs(rec.theta_1 - TWO_PI * math.sin(u)) < 1e-12
        assert abs(rec.theta_2 - TWO_PI * math.cos(u)) < 1e-12
        assert abs(rec.theta_total - TWO_PI) < 1e-12

    def test_entry_face_splits_evenly(self):
        u = 0.6
        rec = analytic_areas(0.0, params(u=u))
        assert abs(rec.theta_a - math.sqrt(2) * math.pi * math.sin(u)) < 1e-12

    def test_regime_three_limits(self):
        p = params(u=math.pi / 4)
        rec = analytic_areas(1e3 / p.kappa, p)
        assert abs(rec.theta_c - math.sqrt(2) * math.pi) < 1e-10
        assert abs(rec.theta_d - math.sqrt(2) * math.pi) < 1e-10
        assert rec.theta_a < 1e-10 and rec.theta_b < 1e-10

    def test_conservation_across_depth(self):
        p = params(u=0.9, alpha_sq=0.8)
        for z in np.linspace(-50 / p.kappa, 50 / p.kappa, 51):
            rec = analytic_areas(z, p)
            assert abs(rec.theta_total - TWO_PI) < 1e-12
            assert abs(rec.theta_1 - TWO_PI * math.sin(0.9)) < 1e-12

    def test_quadrature_reproduces_closed_forms(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            u = rng.uniform(0.05, math.pi / 2 - 0.05)
            alpha_sq = rng.uniform(0.5, 0.95)
            p = params(u=u, alpha_sq=alpha_sq)
            z = rng.uniform(-12, 12) / p.kappa
            grid = centered_grid(p, z)
            snap = analytic_fields(z, grid, p)
            rec = analytic_areas(z, p)
            for i, target in enumerate(rec.thetas()):
                quad = pulse_area(snap.omega[i], grid)
                assert abs(quad - target) <= 1e-6 * max(target, TWO_PI * 1e-4)


class TestAsymptoticSech:
    def test_input_channel_matches_sech_profile(self):
        p = params()
        kz = -30.0
        z = kz / p.kappa
        grid = centered_grid(p, z)
        snap = analytic_fields(z, grid, p)
        envelope = snap.omega_a.real
        center = peak_time(z, p)
        amp = TWO_PI * math.sin(p.u) / (math.pi * p.tau)
        model = amp / np.cosh((grid.t - center) / p.tau)
        mask = model > 1e-6 * model.max()
        rel = np.abs(envelope[mask] - model[mask]) / model[mask]
        assert rel.max() < 1e-4


class TestGroupVelocities:
    def test_endpoint_populations(self):
        gv = group_velocities(params(alpha_sq=1.0, kappa=1.0, tau=1.0))
        assert abs(gv.v_in - 0.5) < 1e-15
        assert gv.v_out == 1.0
        assert gv.drift_out == 0.0

    def test_simulton_matches(self):
        gv = group_velocities(params(alpha_sq=0.5))
        assert gv.v_in == gv.v_out
        assert gv.drift_in == gv.drift_out

    def test_reference_case(self):
        gv = group_velocities(params(alpha_sq=0.75, kappa=1.0, tau=1.0))
        assert abs(gv.v_in - 1 / 1.75) < 1e-15
        assert abs(gv.v_out - 0.8) < 1e-15
        assert isinstance(gv, GroupVelocities)

    def test_output_faster_when_alpha_dominates(self):
        gv = group_velocities(params(alpha_sq=0.9))
        assert gv.v_out > gv.v_in


class TestSolitonParams:
    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            SolitonParams(tau=-1, u=0.5, alpha_sq=0.75, beta_sq=0.25, kappa=1)
        with pytest.raises(DomainError):
            SolitonParams(tau=1, u=2.0, alpha_sq=0.75, beta_sq=0.25, kappa=1)
        with pytest.raises(DomainError):
            SolitonParams(tau=1, u=0.5, alpha_sq=0.75, beta_sq=0.35, kappa=1)
