import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from nonstatic_phase.exceptions import ParameterError
from nonstatic_phase.params import WaveConfig, make_params
from nonstatic_phase.timefunc import (
    NonstaticTimeFunction,
    PerturbedTimeFunction,
    classical_momentum,
    classical_trajectory,
    eval_f,
    ode_residual,
    ode_residual_tolerance,
    require_time,
)
from tests.strategies import valid_params, wave_configs


def central_difference(func, t, h=1e-4):
    return (func(t + h) - func(t - h)) / (2 * h)


class TestEvalF:
    def test_static_is_identity(self, static, vacuum):
        value = eval_f(static, vacuum, np.linspace(0, 5, 11))
        assert_allclose(value.f, 1.0)
        assert_allclose(value.f_dot, 0.0)
        assert_allclose(value.f_ddot, 0.0)

    def test_moderate_at_t0(self, moderate, vacuum):
        assert_allclose(eval_f(moderate, vacuum, 0.0).f, 0.5)

    def test_moderate_quarter_period(self, moderate, vacuum):
        assert_allclose(eval_f(moderate, vacuum, math.pi / 2).f, 2.5, atol=1e-12)

    def test_shifted_t0(self, moderate):
        cfg = WaveConfig(a0=0.0, t0=1.5, omega=2.0)
        assert_allclose(eval_f(moderate, cfg, 1.5 + math.pi / 4).f, 2.5, atol=1e-12)

    def test_derivatives_match_finite_differences(self, extreme_rotated, vacuum):
        tf = NonstaticTimeFunction(extreme_rotated, vacuum)
        t = 1.3
        assert_allclose(tf(t).f_dot, central_difference(lambda s: tf(s).f, t), rtol=1e-6)
        assert_allclose(tf(t).f_ddot, central_difference(lambda s: tf(s).f_dot, t), rtol=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(valid_params(), wave_configs())
    def test_positive(self, p, cfg):
        t = cfg.t0 + np.linspace(0, 2 * math.pi / cfg.omega, 64)
        assert np.all(eval_f(p, cfg, t).f > 0)

    def test_rejects_time_before_t0(self, moderate, vacuum):
        with pytest.raises(ParameterError, match="t0"):
            eval_f(moderate, vacuum, -0.1)


class TestOdeResidual:
    def test_static(self, static, vacuum):
        assert ode_residual(static, vacuum, 3.0) == pytest.approx(0.0, abs=1e-15)

    def test_moderate(self, moderate, vacuum):
        assert abs(ode_residual(moderate, vacuum, 0.7)) <= 1e-9

    def test_extreme_scaled(self, extreme_rotated, vacuum):
        residual = ode_residual(extreme_rotated, vacuum, 1.3)
        f = eval_f(extreme_rotated, vacuum, 1.3).f
        assert abs(residual) <= 1e-7
        assert abs(residual) <= ode_residual_tolerance(extreme_rotated, vacuum, f)

    def test_tolerance_scales_with_largest_coefficient(self, static, extreme, vacuum):
        assert ode_residual_tolerance(static, vacuum, 0.5) == pytest.approx(1e-9)
        assert ode_residual_tolerance(extreme, vacuum, 1.0) == pytest.approx(2e-8)
        assert ode_residual_tolerance(extreme, WaveConfig(omega=2.0), 1.0) == pytest.approx(8e-8)

    @settings(max_examples=50, deadline=None)
    @given(valid_params(), wave_configs())
    def test_holds_for_valid_params(self, p, cfg):
        t = cfg.t0 + np.linspace(0, 4.0, 33)
        f = eval_f(p, cfg, t).f
        assert np.all(np.abs(ode_residual(p, cfg, t)) <= ode_residual_tolerance(p, cfg, f))


class TestClassicalTrajectory:
    @pytest.mark.parametrize(
        "q0, theta0, phase, expected",
        [(1.0, 0.0, 0.0, 1.0), (1.0, 0.0, math.pi / 2, 0.0), (2.0, math.pi / 2, math.pi / 2, -2.0)],
    )
    def test_examples(self, q0, theta0, phase, expected):
        cfg = WaveConfig(q0=q0, amplitude="Q0", theta0=theta0, omega=2.0)
        assert classical_trajectory(cfg, phase / 2.0) == pytest.approx(expected, abs=1e-12)

    def test_momentum_is_scaled_velocity(self):
        cfg = WaveConfig(q0=1.3, amplitude="Q0", theta0=0.4, epsilon=2.0)
        t = 0.9
        assert_allclose(
            classical_momentum(cfg, t), cfg.epsilon * central_difference(lambda s: classical_trajectory(cfg, s), t), rtol=1e-7
        )

    def test_requires_q0(self, small_wave):
        with pytest.raises(ParameterError, match="Q0"):
            classical_trajectory(small_wave, 1.0)


class TestRequireTime:
    def test_accepts_t0(self, vacuum):
        require_time(vacuum, 0.0)
        require_time(vacuum, np.array([0.0, 1.0]))

    def test_rejects_any_earlier(self, vacuum):
        with pytest.raises(ParameterError):
            require_time(vacuum, np.array([1.0, -1e-9]))


class TestPerturbedTimeFunction:
    def test_matches_at_t0(self, moderate, small_wave):
        base = NonstaticTimeFunction(moderate, small_wave)(0.0)
        perturbed = PerturbedTimeFunction(moderate, small_wave, scale=1.01)(0.0)
        assert_allclose(perturbed.f, base.f)
        assert_allclose(perturbed.f_dot, base.f_dot)
        assert_allclose(perturbed.f_ddot, 1.01 * base.f_ddot)

    def test_breaks_the_nonlinear_equation(self, moderate, small_wave):
        tf = PerturbedTimeFunction(moderate, small_wave, scale=1.01)
        v = tf(0.7)
        residual = v.f_ddot - (v.f_dot**2 / (2 * v.f) - 2 * (v.f - 1 / v.f))
        assert abs(residual) > 1e-4

    def test_phase_time_derivative(self, moderate, small_wave):
        tf = PerturbedTimeFunction(moderate, small_wave, scale=1.01)
        t = 0.8
        assert_allclose(central_difference(tf.phase_time, t, h=1e-3), 1 / tf(t).f, rtol=1e-5)

    def test_unit_scale_is_unperturbed(self, moderate, small_wave):
        tf = PerturbedTimeFunction(moderate, small_wave, scale=1.0)
        assert_allclose(tf.phase_time(np.array([0.5, 1.0])), NonstaticTimeFunction(moderate, small_wave).phase_time(np.array([0.5, 1.0])), atol=1e-10)
