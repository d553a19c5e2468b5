import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from nonstatic_phase.exceptions import ConfigError
from nonstatic_phase.params import NonstaticityParams, WaveConfig, make_params, nonstaticity_measure
from nonstatic_phase.phases import gamma_g, phase_time_T, wrap_phase
from nonstatic_phase.verify import (
    CHECKS,
    CheckRecord,
    constancy_audit,
    gauge_invariance_check,
    overlap_boundary_phase,
    quad_gamma_d,
    quad_gamma_g,
    quad_T,
    random_inputs,
    run_suite,
    schrodinger_residual,
)
from nonstatic_phase.verify.audit import check_expansion
from nonstatic_phase.verify.gauge import GAUGE_TOL, gauge_from_samples
from nonstatic_phase.verify.residuals import ResidualReport, default_time_grid, max_time_step
from nonstatic_phase.verify.stencils import first_derivative, second_derivative, time_derivative
from tests.strategies import valid_params, wave_configs


class TestStencils:
    def test_polynomials_are_exact(self):
        h = 0.1
        x = np.arange(-20, 21) * h
        values = x**3 - 2 * x
        interior = slice(2, -2)
        assert_allclose(first_derivative(values, h)[interior], (3 * x**2 - 2)[interior], atol=1e-10)
        assert_allclose(second_derivative(values, h)[interior], (6 * x)[interior], atol=1e-9)

    def test_time_derivative(self):
        assert_allclose(time_derivative(np.sin, 0.3, 1e-3), math.cos(0.3), atol=1e-11)


class TestOracles:
    def test_phase_time(self, moderate, vacuum):
        assert_allclose(quad_T(moderate, vacuum, math.pi), math.pi, atol=1e-9)
        assert_allclose(quad_T(moderate, vacuum, np.array([0.5, 2.0])), phase_time_T(moderate, vacuum, np.array([0.5, 2.0])), atol=1e-9)

    def test_static_geometric_phase(self, static, small_wave):
        assert_allclose(quad_gamma_g(static, small_wave, 1.0), 0.01, atol=1e-9)

    def test_dynamical_phase_offsets(self, static):
        cfg = WaveConfig(a0=0.1, gamma_d0=0.25)
        assert_allclose(quad_gamma_d(static, cfg, 1.0), -0.51 + 0.25, atol=1e-9)

    @pytest.mark.slow
    @settings(max_examples=200, deadline=None)
    @given(valid_params(c_max=20.0), wave_configs())
    def test_closed_forms_match_quadrature(self, p, cfg):
        t = cfg.t0 + np.linspace(0.0, 3 * math.pi / cfg.omega, 7)[1:]
        assert np.max(np.abs(phase_time_T(p, cfg, t) - quad_T(p, cfg, t))) <= 1e-9
        closed = gamma_g(p, cfg, t)
        assert np.max(np.abs(closed - quad_gamma_g(p, cfg, t))) <= 1e-8 * max(1.0, float(np.max(np.abs(closed))))


class TestConstancyAudit:
    def test_static(self, static, small_wave):
        report = constancy_audit(static, small_wave)
        assert report.max_abs <= 1e-13
        assert report.passed

    def test_moderate_from_q0(self, moderate):
        report = constancy_audit(moderate, WaveConfig(q0=1.0, amplitude="Q0"))
        assert report.grid_meta["with_a0"]
        assert report.max_abs <= 1e-10

    def test_extreme(self):
        p = NonstaticityParams(20.0, 20.0, math.sqrt(399.0), math.pi / 8)
        report = constancy_audit(p, WaveConfig(q0=1.0, amplitude="Q0", theta0=math.pi / 3))
        assert report.max_abs <= 1e-9

    def test_needs_samples(self, static, vacuum):
        with pytest.raises(ValueError):
            constancy_audit(static, vacuum, n_samples=1)


@pytest.mark.slow
class TestSchrodingerResidual:
    def test_static_ground_state(self, static, vacuum):
        report = schrodinger_residual(static, vacuum, t_grid=default_time_grid(static, vacuum, n_times=6))
        assert report.rms <= 1e-6
        assert report.passed

    def test_moderate(self, moderate, small_wave):
        t_grid = default_time_grid(moderate, small_wave, n_times=6)
        report = schrodinger_residual(moderate, small_wave, t_grid=t_grid)
        assert report.rms <= 1e-5
        assert report.grid_meta["dt"] == pytest.approx(max_time_step(moderate, small_wave))

    def test_refinement_gain(self, moderate, small_wave):
        cfg = WaveConfig(a0=0.1)
        coarse = np.linspace(-12, 12, 241)
        t_grid = default_time_grid(moderate, cfg, n_times=4)
        report = schrodinger_residual(moderate, cfg, t_grid=t_grid, q_grid=coarse, tolerance=1.0, check_refinement=True)
        assert report.grid_meta["refinement_gain"] >= 4

    def test_phase_factor_is_required(self, moderate, small_wave):
        t_grid = default_time_grid(moderate, small_wave, n_times=6)[1:]
        with_phase = schrodinger_residual(moderate, small_wave, t_grid=t_grid)
        without = schrodinger_residual(moderate, small_wave, t_grid=t_grid, with_phase=False)
        assert without.max_abs >= 100 * with_phase.max_abs
        assert not without.passed

    def test_perturbed_time_function_fails(self, moderate, small_wave):
        t_grid = default_time_grid(moderate, small_wave, n_times=6)[1:]
        exact = schrodinger_residual(moderate, small_wave, t_grid=t_grid)
        perturbed = schrodinger_residual(moderate, small_wave, t_grid=t_grid, perturb_fddot=1.01)
        assert perturbed.max_abs >= 100 * exact.max_abs
        assert not perturbed.passed

    def test_report_dict(self, static, vacuum):
        report = schrodinger_residual(static, vacuum, t_grid=np.array([0.0, 1.0]))
        record = report.to_dict()
        assert set(record) == {"max_abs", "rms", "tolerance", "grid_meta", "pass"}
        assert record["grid_meta"]["n_times"] == 2


@pytest.mark.slow
class TestGaugeInvariance:
    def test_no_gauge(self, moderate):
        cfg = WaveConfig(a0=0.5, theta=0.3)
        t = 1.0
        plain, gauged = gauge_invariance_check(moderate, cfg, None, t)
        assert abs(plain - gauged) <= 1e-12
        expected = gamma_g(moderate, cfg, t) + overlap_boundary_phase(moderate, cfg, t)
        assert abs(wrap_phase(plain - expected)) <= 1e-6

    def test_linear_gauge_on_static(self, static, small_wave):
        plain, gauged = gauge_invariance_check(static, small_wave, lambda s: 3 * s, 1.0, alpha_dot=lambda s: 3.0)
        assert abs(plain - gauged) <= GAUGE_TOL

    def test_oscillating_gauge(self, moderate, small_wave):
        plain, gauged = gauge_invariance_check(moderate, small_wave, lambda s: math.sin(2 * s), 1.0)
        assert abs(plain - gauged) <= GAUGE_TOL

    def test_sampled_gauge(self, moderate, small_wave):
        times = np.linspace(0.0, 1.0, 41)
        plain, gauged = gauge_invariance_check(moderate, small_wave, (times, np.cos(times) ** 2), 1.0)
        assert abs(plain - gauged) <= GAUGE_TOL

    def test_spline_gauge(self):
        alpha, alpha_dot = gauge_from_samples([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 3.0])
        assert alpha(1.5) == pytest.approx(1.5)
        assert alpha_dot(0.7) == pytest.approx(1.0)


class TestSuite:
    FAST = ["constancy", "g_function_routes", "harmonization", "ode_residual", "phase_time_oracle", "rate_identity"]

    def test_fast_subset_passes(self, moderate, small_wave):
        records = run_suite(moderate, small_wave, seed=1, checks=self.FAST)
        assert [r.name for r in records] == sorted(self.FAST)
        assert all(r.passed for r in records)

    def test_deterministic_across_workers(self, moderate, small_wave):
        serial = run_suite(moderate, small_wave, seed=4, checks=self.FAST)
        parallel = run_suite(moderate, small_wave, seed=4, checks=self.FAST, n_jobs=2)
        assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]

    def test_unknown_check(self, moderate, small_wave):
        with pytest.raises(ConfigError, match="unknown check"):
            run_suite(moderate, small_wave, checks=["nope"])

    def test_random_inputs_are_reproducible(self):
        p1, cfg1 = random_inputs(7)
        p2, cfg2 = random_inputs(7)
        assert p1 == p2
        assert cfg1 == cfg2
        assert random_inputs(8)[0] != p1

    def test_random_inputs_pass(self):
        p, cfg = random_inputs(3)
        assert all(r.passed for r in run_suite(p, cfg, seed=3, checks=self.FAST))

    def test_random_inputs_span_strong_nonstaticity(self):
        draws = [random_inputs(seed)[0] for seed in range(200)]
        d = np.array([float(nonstaticity_measure(p)) for p in draws])
        assert d.max() > 10.0
        assert d.min() < 2.0
        assert np.all(d <= 15.0 + 1e-9)
        assert all(p.c1 * p.c2 >= 1.0 for p in draws)

    @pytest.mark.slow
    def test_grid_checks_under_strong_chirp(self):
        p = make_params(10.0, 4.0, phi=0.3)
        records = run_suite(p, WaveConfig(a0=1.0), checks=["eigen_relation", "expectation_H"])
        assert all(r.passed for r in records), [r.to_dict() for r in records]

    def test_expansion_truncation_is_logged(self, static, caplog):
        with caplog.at_level(logging.WARNING):
            metric, tolerance = check_expansion(static, WaveConfig(a0=8.0), 0)
        assert "truncated at n_max=150" in caplog.text
        assert metric <= tolerance

    @pytest.mark.slow
    def test_full_suite_on_static(self, static, small_wave):
        records = run_suite(static, small_wave, n_jobs=2)
        assert sorted(r.name for r in records) == sorted(CHECKS)
        assert all(r.passed for r in records), [r.to_dict() for r in records if not r.passed]

    def test_record_dict(self):
        record = CheckRecord(name="x", params={"c1": 1.0}, metric=2e-7, tolerance=1e-6)
        assert record.to_dict() == {"name": "x", "params": {"c1": 1.0}, "metric": 2e-7, "tolerance": 1e-6, "pass": True}
        assert not CheckRecord("y", {}, 1.0, 0.5).passed

    def test_residual_report(self):
        assert ResidualReport(1e-7, 1e-8, 1e-6).passed
        assert not ResidualReport(1e-5, 1e-8, 1e-6).passed
