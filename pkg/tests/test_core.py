import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbx4.core import (DomainError, FieldSnapshot, MediumSpec, PulseSpec,
                       RetardedGrid, generate_pulse, initial_snapshot,
                       make_seed_state, validate_density_matrix)


def wide_grid(n_t=4001, half=40.0):
    return RetardedGrid(t_min=-half, t_max=half, n_t=n_t, z_max=1.0, n_z=1)


class TestSeedState:
    @pytest.mark.parametrize("alpha_sq,beta_sq", [(1.0, 0.0), (0.75, 0.25),
                                                  (0.5, 0.5)])
    def test_diagonal(self, alpha_sq, beta_sq):
        rho = make_seed_state(alpha_sq, beta_sq)
        assert rho[0, 0] == alpha_sq
        assert rho[1, 1] == beta_sq
        assert rho[2, 2] == 0 and rho[3, 3] == 0
        off = rho - np.diag(np.diag(rho))
        assert np.all(off == 0)

    def test_satisfies_invariants(self):
        validate_density_matrix(make_seed_state(0.75, 0.25))
        validate_density_matrix(make_seed_state(1.0, 0.0))

    @pytest.mark.parametrize("alpha_sq,beta_sq", [(0.5, 0.6), (1.1, -0.1),
                                                  (-0.2, 1.2), (0.7, 0.2)])
    def test_rejects_bad_populations(self, alpha_sq, beta_sq):
        with pytest.raises(DomainError):
            make_seed_state(alpha_sq, beta_sq)

    def test_tolerates_rounding(self):
        make_seed_state(0.1, 1.0 - 0.1)


class TestGrid:
    def test_spacing_identity(self):
        grid = RetardedGrid(t_min=-37.3, t_max=11.9, n_t=1237, z_max=5.5, n_z=17)
        span = grid.t_max - grid.t_min
        assert abs(grid.dt * (grid.n_t - 1) - span) <= 4 * math.ulp(span)
        assert len(grid.t) == grid.n_t
        assert len(grid.z) == grid.n_z + 1
        assert grid.z[0] == 0.0 and grid.z[-1] == grid.z_max

    @pytest.mark.parametrize("kwargs", [
        dict(t_min=0.0, t_max=1.0, n_t=1, z_max=1.0, n_z=1),
        dict(t_min=0.0, t_max=1.0, n_t=16, z_max=1.0, n_z=0),
        dict(t_min=1.0, t_max=1.0, n_t=16, z_max=1.0, n_z=1),
        dict(t_min=0.0, t_max=1.0, n_t=16, z_max=-2.0, n_z=1),
    ])
    def test_rejects_degenerate(self, kwargs):
        with pytest.raises(DomainError):
            RetardedGrid(**kwargs)


class TestPulseSynthesis:
    def test_sech_peak_amplitude(self):
        spec = PulseSpec(channel="a", shape="sech", area=2 * math.pi,
                         width=1.0, center=0.0)
        grid = wide_grid()
        env = generate_pulse(spec, grid)
        assert np.isrealobj(env)
        assert abs(env.max() - 2.0) < 1e-8
        assert abs(np.trapezoid(env, grid.t) - 2 * math.pi) < 1e-9

    def test_zero_area_is_zero(self):
        for shape in ("sech", "gaussian", "square_gaussian"):
            spec = PulseSpec(channel="b", shape=shape, area=0.0, width=1.0,
                             center=0.0)
            assert not generate_pulse(spec, wide_grid()).any()

    def test_square_gaussian_peak(self):
        # peak = area / (width * 2 * Gamma(5/4)); cross-checked against a
        # 10x finer trapezoid quadrature of the unit shape
        area = 1.4 * math.pi
        spec = PulseSpec(channel="a", shape="square_gaussian", area=area,
                         width=1.0, center=0.0)
        grid = wide_grid()
        env = generate_pulse(spec, grid)
        assert abs(env.max() - 2.426201288258678) < 1e-7

        fine = wide_grid(n_t=10 * (grid.n_t - 1) + 1)
        unit_fine = np.exp(-(fine.t ** 4))
        peak_oracle = area / np.trapezoid(unit_fine, fine.t)
        assert abs(env.max() - peak_oracle) < 1e-9

    def test_area_matches_request_each_shape(self):
        grid = wide_grid()
        for shape in ("sech", "gaussian", "square_gaussian"):
            spec = PulseSpec(channel="c", shape=shape, area=0.7123,
                             width=1.3, center=-2.0)
            env = generate_pulse(spec, grid)
            assert abs(np.trapezoid(env, grid.t) - 0.7123) < 1e-9

    @given(area=st.floats(1e-6, 50.0), width=st.floats(0.2, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_doubling_area_doubles_samples_exactly(self, area, width):
        grid = RetardedGrid(t_min=-30.0, t_max=30.0, n_t=501, z_max=1.0, n_z=1)
        one = generate_pulse(PulseSpec("a", "gaussian", area, width, 0.0), grid)
        two = generate_pulse(PulseSpec("a", "gaussian", 2 * area, width, 0.0), grid)
        assert np.array_equal(two, 2.0 * one)

    def test_clipped_pulse_rejected(self):
        spec = PulseSpec(channel="a", shape="gaussian", area=1.0, width=2.0,
                         center=9.5)
        grid = RetardedGrid(t_min=-10.0, t_max=10.0, n_t=801, z_max=1.0, n_z=1)
        with pytest.raises(DomainError, match="carries only"), pytest.warns(UserWarning):
            generate_pulse(spec, grid)

    def test_edge_proximity_warns(self):
        spec = PulseSpec(channel="a", shape="gaussian", area=1.0, width=1.0,
                         center=7.0)
        grid = RetardedGrid(t_min=-10.0, t_max=10.0, n_t=801, z_max=1.0, n_z=1)
        with pytest.warns(UserWarning, match="four widths"):
            env = generate_pulse(spec, grid)
        assert abs(np.trapezoid(env, grid.t) - 1.0) < 1e-9

    def test_unsupported_shape_rejected(self):
        with pytest.raises(DomainError, match="unsupported pulse shape"):
            PulseSpec(channel="a", shape="boxcar", area=1.0, width=1.0,
                      center=0.0)

    def test_unknown_channel_rejected(self):
        with pytest.raises(DomainError, match="unknown channel"):
            PulseSpec(channel="e", shape="sech", area=1.0, width=1.0,
                      center=0.0)

    def test_initial_snapshot_sums_channels(self):
        grid = wide_grid(n_t=501)
        pulses = [PulseSpec("a", "sech", 1.0, 1.0, 0.0),
                  PulseSpec("a", "sech", 0.5, 1.0, 0.0),
                  PulseSpec("c", "gaussian", 0.2, 1.0, 0.0)]
        snap = initial_snapshot(pulses, grid)
        assert abs(np.trapezoid(snap.omega_a, grid.t).real - 1.5) < 1e-9
        assert abs(np.trapezoid(snap.omega_c, grid.t).real - 0.2) < 1e-9
        assert not snap.omega_b.any() and not snap.omega_d.any()


class TestFieldSnapshot:
    def test_shape_enforced(self):
        with pytest.raises(DomainError):
            FieldSnapshot(z=0.0, omega=np.zeros((3, 10)))

    def test_require_finite(self):
        omega = np.zeros((4, 8), dtype=complex)
        omega[2, 5] = np.nan
        snap = FieldSnapshot(z=1.0, omega=omega)
        with pytest.raises(DomainError, match="channel c"):
            snap.require_finite()


class TestMediumSpec:
    def test_sharp_line_sentinel(self):
        m = MediumSpec(mu=1.0, t2_star=None, n_detuning=1, alpha_sq=1.0,
                       beta_sq=0.0, length=1.0)
        assert m.sharp_line

    def test_sharp_line_requires_single_node(self):
        with pytest.raises(DomainError, match="one detuning node"):
            MediumSpec(mu=1.0, t2_star=None, n_detuning=4, alpha_sq=1.0,
                       beta_sq=0.0, length=1.0)

    def test_population_sum_enforced(self):
        with pytest.raises(DomainError):
            MediumSpec(mu=1.0, t2_star=5.0, n_detuning=8, alpha_sq=0.7,
                       beta_sq=0.2, length=1.0)

    def test_zero_mu_allowed(self):
        MediumSpec(mu=0.0, t2_star=None, n_detuning=1, alpha_sq=1.0,
                   beta_sq=0.0, length=1.0)


class TestDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        rho = make_seed_state(1.0, 0.0)
        rho[0, 1] = 0.1
        with pytest.raises(DomainError, match="Hermiticity"):
            validate_density_matrix(rho)

    def test_rejects_bad_trace(self):
        rho = make_seed_state(1.0, 0.0) * 1.5
        with pytest.raises(DomainError, match="trace"):
            validate_density_matrix(rho)

    def test_rejects_negative_population(self):
        rho = make_seed_state(1.0, 0.0)
        rho[1, 1] = -0.2
        rho[0, 0] = 1.2
        with pytest.raises(DomainError):
            validate_density_matrix(rho)

    @given(alpha_sq=st.floats(0.0, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_any_valid_seed_passes(self, alpha_sq):
        validate_density_matrix(make_seed_state(alpha_sq, 1.0 - alpha_sq))
