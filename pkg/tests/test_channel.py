import math
from dataclasses import replace

import pytest

from mc_arelab.channel import (
    ChannelSummary,
    PhysicalParams,
    ReceiverGeometry,
    cir,
    cir_at,
    cir_uca,
    peak_time,
    summarize,
)
from mc_arelab.errors import ParameterError, SearchError
from mc_arelab.gridgeom import GridKind, enumerate_sites

from oracles import cir_quadrature

DEFAULTS = PhysicalParams()
GEOM = ReceiverGeometry.centered(DEFAULTS)


class TestTypes:
    def test_default_geometry(self):
        assert GEOM.z_s == pytest.approx(0.4)
        assert GEOM.z_e == pytest.approx(0.6)
        assert GEOM.volume == pytest.approx(0.1**2 * math.pi * 0.2, rel=1e-14)

    def test_params_validation_names_field(self):
        with pytest.raises(ParameterError, match="D"):
            PhysicalParams(D=0.0)
        with pytest.raises(ParameterError, match="s_rx"):
            PhysicalParams(s_rx=-0.1)
        with pytest.raises(ParameterError, match="n_mol"):
            PhysicalParams(n_mol=0)
        with pytest.raises(ParameterError, match="c_noise"):
            PhysicalParams(c_noise=-1.0)

    def test_geometry_validation(self):
        with pytest.raises(ParameterError):
            ReceiverGeometry(z_s=0.6, z_e=0.4, volume=1.0)
        with pytest.raises(ParameterError):
            ReceiverGeometry(z_s=0.4, z_e=0.6, volume=0.0)


class TestCir:
    def test_rejects_nonpositive_time(self):
        with pytest.raises(ParameterError):
            cir(0.0, 0.0, DEFAULTS, GEOM)
        with pytest.raises(ParameterError):
            cir(-1.0, 0.0, DEFAULTS, GEOM)

    def test_wrapper_defines_origin(self):
        assert cir_at(0.0, 0.0, DEFAULTS, GEOM) == 0.0
        assert cir_at(2.0, 0.0, DEFAULTS, GEOM) == cir(2.0, 0.0, DEFAULTS, GEOM)

    def test_vanishes_as_t_to_zero(self):
        assert cir(1e-9, 0.0, DEFAULTS, GEOM) <= 1e-12
        assert cir(1e-9, 0.2, DEFAULTS, GEOM) <= 1e-12

    def test_far_transmitter_is_dead(self):
        assert cir(2.5, 1e3, DEFAULTS, GEOM) < 1e-300

    def test_quadrature_agreement_on_axis(self):
        value = cir(2.5, 0.0, DEFAULTS, GEOM)
        ref = cir_quadrature(2.5, 0.0, DEFAULTS, GEOM)
        assert abs(value - ref) / ref <= 1e-8

    def test_quadrature_agreement_off_axis(self):
        for t, r_i in [(1.2, 0.35), (4.0, 0.2 * math.sqrt(3.0)), (0.7, 0.1)]:
            value = cir(t, r_i, DEFAULTS, GEOM)
            ref = cir_quadrature(t, r_i, DEFAULTS, GEOM)
            assert abs(value - ref) / ref <= 1e-8

    def test_truncation_insensitive_at_first_ring(self):
        a = cir(1.845, 0.2, DEFAULTS, GEOM, k_max=20)
        b = cir(1.845, 0.2, DEFAULTS, GEOM, k_max=40)
        assert abs(a - b) <= 1e-12

    def test_truncation_convergence_at_eval_points(self):
        t_m = peak_time(DEFAULTS, GEOM)
        for ring in (1, math.sqrt(3), 2, math.sqrt(7), 3):
            r_i = 0.2 * ring
            a = cir(t_m, r_i, DEFAULTS, GEOM, k_max=20)
            b = cir(t_m, r_i, DEFAULTS, GEOM, k_max=60)
            assert abs(a - b) / b < 1e-10

    def test_bounded_probability(self):
        for t in (0.1, 0.5, 2.0, 10.0):
            for r_i in (0.0, 0.1, 0.4, 1.0):
                value = cir(t, r_i, DEFAULTS, GEOM)
                assert 0.0 <= value <= 1.0

    def test_monotone_decay_across_rings(self):
        t_m = peak_time(DEFAULTS, GEOM)
        dists = [0.2 * f for f in (1, math.sqrt(3), 2, math.sqrt(7), 3)]
        vals = [cir(t_m, r, DEFAULTS, GEOM) for r in dists]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_gamma_forms_agree_on_axis(self):
        a = cir(1.7, 0.0, DEFAULTS, GEOM, gamma_form="lower")
        b = cir(1.7, 0.0, DEFAULTS, GEOM, gamma_form="regularized")
        assert a == b

    def test_regularized_form_decays_faster(self):
        a = cir(1.7, 0.4, DEFAULTS, GEOM, gamma_form="lower")
        b = cir(1.7, 0.4, DEFAULTS, GEOM, gamma_form="regularized")
        assert b < a

    def test_rejects_bad_arguments(self):
        with pytest.raises(ParameterError):
            cir(1.0, -0.1, DEFAULTS, GEOM)
        with pytest.raises(ParameterError):
            cir(1.0, 0.1, DEFAULTS, GEOM, k_max=-1)
        with pytest.raises(ParameterError):
            cir(1.0, 0.1, DEFAULTS, GEOM, gamma_form="upper")


class TestCirUca:
    def test_close_to_series_for_fast_diffusion(self):
        params = replace(DEFAULTS, D=0.1)
        geom = ReceiverGeometry.centered(params)
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 36)
        r_13 = layout.sites[13].radial_distance
        t_m = peak_time(params, geom)
        approx = cir_uca(t_m, r_13, params, geom)
        exact = cir(t_m, r_13, params, geom)
        assert abs(approx - exact) / exact <= 0.05

    def test_vanishes_as_t_to_zero(self):
        assert cir_uca(1e-9, 0.0, DEFAULTS, GEOM) == 0.0

    def test_linear_in_volume(self):
        g1 = ReceiverGeometry(z_s=0.4, z_e=0.6, volume=0.005)
        g2 = ReceiverGeometry(z_s=0.35, z_e=0.65, volume=0.010)
        assert cir_uca(2.0, 0.1, DEFAULTS, g2) == pytest.approx(
            2.0 * cir_uca(2.0, 0.1, DEFAULTS, g1), rel=1e-14
        )

    def test_rejects_nonpositive_time(self):
        with pytest.raises(ParameterError):
            cir_uca(0.0, 0.0, DEFAULTS, GEOM)


class TestPeakTime:
    def test_advection_limit(self):
        params = replace(DEFAULTS, D=1e-6)
        geom = ReceiverGeometry.centered(params)
        assert peak_time(params, geom) == pytest.approx(2.5, abs=0.01)

    def test_against_dense_scan_oracle(self):
        t_m = peak_time(DEFAULTS, GEOM)
        # frozen golden value from a 1e-4 s dense scan
        assert t_m == pytest.approx(1.84484, abs=2e-4)
        ts = [1.80 + 1e-4 * i for i in range(1001)]
        best = max(ts, key=lambda t: cir(t, 0.0, DEFAULTS, GEOM))
        assert t_m == pytest.approx(best, abs=1e-4)

    def test_halving_flow_doubles_arrival(self):
        slow = replace(DEFAULTS, D=1e-6, v=0.1)
        geom = ReceiverGeometry.centered(slow)
        assert peak_time(slow, geom) == pytest.approx(5.0, abs=0.02)

    def test_boundary_peak_is_an_error(self):
        with pytest.raises(SearchError):
            peak_time(DEFAULTS, GEOM, search_horizon=1.0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ParameterError):
            peak_time(DEFAULTS, GEOM, search_horizon=-1.0)
        with pytest.raises(ParameterError):
            peak_time(DEFAULTS, GEOM, tol=0.0)


class TestSummarize:
    def test_no_noise_means_no_noise_count(self):
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 6)
        summary = summarize(DEFAULTS, GEOM, layout)
        assert summary.mu_n == 0.0
        assert summary.mu_s > 0.0

    def test_noise_count_scales_with_volume(self):
        params = replace(DEFAULTS, c_noise=10.0)
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 6)
        summary = summarize(params, GEOM, layout)
        assert summary.mu_n == pytest.approx(10.0 * GEOM.volume, rel=1e-14)

    def test_ring_grouping(self):
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 36)
        summary = summarize(DEFAULTS, GEOM, layout)
        assert summary.n_interferers == 36
        assert [count for _, count in summary.cbar] == [6, 6, 6, 12, 6]
        values = [value for value, _ in summary.cbar]
        assert values == sorted(values, reverse=True)

    def test_equidistant_interferers_share_expectation(self):
        # two lattice sites at the same radius get the exact same value
        t_m = peak_time(DEFAULTS, GEOM)
        a = cir(t_m, 0.2, DEFAULTS, GEOM)
        b = cir(t_m, 0.2, DEFAULTS, GEOM)
        assert a == b

    def test_reference_sinr_for_36_interferers(self):
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 36)
        summary = summarize(DEFAULTS, GEOM, layout, gamma_form="regularized")
        sinr = summary.mu_s / summary.cbar_sum
        assert sinr == pytest.approx(0.163543, rel=1e-3)

    def test_explicit_sampling_time_is_honored(self):
        layout = enumerate_sites(GridKind.HEXAGONAL, 0.2, 6)
        summary = summarize(DEFAULTS, GEOM, layout, t_m=2.0)
        assert summary.t_m == 2.0
        assert summary.mu_s == pytest.approx(100 * cir(2.0, 0.0, DEFAULTS, GEOM), rel=1e-14)

    def test_summary_accessors(self):
        summary = ChannelSummary(t_m=1.0, mu_s=4.0, cbar=((2.0, 6), (1.0, 12)), mu_n=0.5)
        assert summary.cbar_sum == pytest.approx(24.0)
        assert summary.n_interferers == 18
