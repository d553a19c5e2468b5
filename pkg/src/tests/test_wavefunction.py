import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from nonstatic_phase.exceptions import ParameterError
from nonstatic_phase.params import WaveConfig, make_params
from nonstatic_phase.phases import eigenvalue_A, gamma_d_rate
from nonstatic_phase.wavefunction import (
    DEFAULT_GRID_POINTS,
    HERMITE_N_MAX,
    MAX_GRID_POINTS,
    CoherentWave,
    FieldGrid,
    apply_annihilation,
    as_field,
    coherent_eigenfunction,
    coherent_from_expansion,
    coherent_from_fock_expansion,
    coherent_wavefunction,
    expansion_coefficients,
    expansion_order,
    expectation_H,
    expectation_I,
    fock_basis,
    fock_eigenfunction,
    fock_wavefunction,
    grid_expectation_H,
    grid_points,
    hermite,
    make_grid,
    zeta,
)

PI_QUARTER = np.pi ** -0.25


def grid_norm(values, q):
    return integrate.trapezoid(np.abs(values) ** 2, q)


class TestHermite:
    @pytest.mark.parametrize("n, x, expected", [(0, 7.0, 1.0), (1, 0.5, 1.0), (3, 1.0, -4.0), (4, 0.0, 12.0)])
    def test_values(self, n, x, expected):
        assert hermite(n, x) == pytest.approx(expected)

    def test_vectorized(self):
        x = np.linspace(-2, 2, 9)
        assert_allclose(hermite(2, x), 4 * x**2 - 2)

    def test_order_limits(self):
        with pytest.raises(ParameterError, match="n_max"):
            hermite(HERMITE_N_MAX + 1, 0.0)
        with pytest.raises(ParameterError):
            hermite(-1, 0.0)

    def test_high_order_functions_stay_orthonormal(self, static, vacuum):
        q = np.linspace(-25.0, 25.0, 8001)
        basis = fock_basis(static, vacuum, 120, q, 0.0)
        assert np.all(np.isfinite(basis))
        gram = (np.conj(basis) @ basis.T) * (q[1] - q[0])
        assert_allclose(gram, np.eye(121), atol=1e-8)


class TestFockEigenfunction:
    def test_static_ground_state_peak(self, static, vacuum):
        assert_allclose(fock_eigenfunction(static, vacuum, 0, 0.0, 0.0), PI_QUARTER)

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_odd_levels_vanish_at_origin(self, moderate, vacuum, n):
        assert abs(fock_eigenfunction(moderate, vacuum, n, 0.0, 0.8)) < 1e-15

    def test_moderate_at_t0(self, moderate, vacuum):
        z = zeta(moderate, vacuum, 0.0).zeta
        assert z == pytest.approx(2.0)
        value = fock_eigenfunction(moderate, vacuum, 0, 1.0, 0.0)
        assert_allclose(abs(value), (2.0 / np.pi) ** 0.25 * math.exp(-1.0))

    def test_orthonormal(self, extreme_rotated, vacuum):
        q = make_grid(extreme_rotated, vacuum, 8192, n=6)
        basis = fock_basis(extreme_rotated, vacuum, 6, q, 0.7)
        gram = integrate.trapezoid(np.conj(basis)[:, None, :] * basis[None, :, :], q, axis=-1)
        assert_allclose(gram, np.eye(7), atol=1e-8)

    def test_wavefunction_phase(self, static, vacuum):
        assert_allclose(fock_wavefunction(static, vacuum, 0, 0.0, 0.0), fock_eigenfunction(static, vacuum, 0, 0.0, 0.0))
        assert_allclose(fock_wavefunction(static, vacuum, 0, 0.0, np.pi), PI_QUARTER * np.exp(-0.5j * np.pi), atol=1e-12)


class TestCoherentWave:
    def test_vacuum_is_ground_state(self, moderate, vacuum):
        q = np.linspace(-4, 4, 33)
        for t in (0.0, 0.9, 2.4):
            assert_allclose(coherent_eigenfunction(moderate, vacuum, q, t), fock_eigenfunction(moderate, vacuum, 0, q, t), atol=1e-14)

    def test_static_displacement(self, static):
        cfg = WaveConfig(a0=1.2)
        q = np.linspace(-6, 8, 14001)
        density = np.abs(coherent_eigenfunction(static, cfg, q, 0.0)) ** 2
        assert q[np.argmax(density)] == pytest.approx(math.sqrt(2) * 1.2, abs=2e-3)
        assert np.max(np.sqrt(density)) == pytest.approx(PI_QUARTER, rel=1e-6)

    @pytest.mark.parametrize("a0", [0.0, 0.5, 2.0])
    def test_normalized(self, extreme_rotated, a0):
        cfg = WaveConfig(a0=a0, theta=0.4)
        q = make_grid(extreme_rotated, cfg)
        for t in (0.0, 0.6, 1.7):
            assert abs(grid_norm(coherent_eigenfunction(extreme_rotated, cfg, q, t), q) - 1) <= 1e-8

    def test_wavefunction_at_t0(self, moderate):
        cfg = WaveConfig(a0=0.7)
        q = np.linspace(-3, 3, 13)
        assert_allclose(coherent_wavefunction(moderate, cfg, q, 0.0), coherent_eigenfunction(moderate, cfg, q, 0.0))

    def test_static_vacuum_phase(self, static, vacuum):
        assert_allclose(coherent_wavefunction(static, vacuum, 0.0, 1.0), PI_QUARTER * np.exp(-0.5j), atol=1e-12)

    def test_q0_is_resolved(self, moderate):
        wave = CoherentWave(moderate, WaveConfig(q0=1.0, amplitude="Q0"))
        assert not wave.cfg.q0_authoritative
        assert wave.cfg.a0 > 0

    def test_eigen_relation(self, moderate):
        cfg = WaveConfig(a0=0.8, theta=1.0)
        q = make_grid(moderate, cfg)
        for t in (0.0, 1.1):
            field = CoherentWave(moderate, cfg, with_phase=False).field(q, t)
            diff = apply_annihilation(moderate, cfg, field) - eigenvalue_A(moderate, cfg, t).value * field.values
            assert math.sqrt(grid_norm(diff, q)) <= 1e-6

    @pytest.mark.parametrize("params", ["extreme", "chirped"])
    def test_eigen_relation_under_strong_chirp(self, request, params):
        p = request.getfixturevalue("extreme") if params == "extreme" else make_params(10.0, 4.0, phi=0.3)
        cfg = WaveConfig(a0=1.0)
        q = make_grid(p, cfg)
        for t in (0.0, 1.1, 2.3):
            field = CoherentWave(p, cfg, with_phase=False).field(q, t)
            a = eigenvalue_A(p, cfg, t).value
            diff = apply_annihilation(p, cfg, field) - a * field.values
            assert math.sqrt(grid_norm(diff, q)) / max(1.0, abs(a)) <= 1e-6


class TestExpansion:
    def test_vacuum(self, moderate, vacuum):
        coeffs = expansion_coefficients(moderate, vacuum, 5)
        assert_allclose(coeffs.b, [1, 0, 0, 0, 0, 0])

    def test_poisson_weights(self, moderate):
        cfg = WaveConfig(a0=1.5)
        coeffs = expansion_coefficients(moderate, cfg, expansion_order(1.5), t=0.9)
        assert_allclose(np.sum(np.abs(coeffs.b) ** 2), 1.0, atol=1e-12)
        n = np.arange(4)
        expected = np.exp(-1.5**2) * 1.5 ** (2 * n) / np.array([1, 1, 2, 6])
        assert_allclose(np.abs(coeffs.b[:4]) ** 2, expected)

    def test_a_is_time_constant(self, extreme_rotated):
        cfg = WaveConfig(a0=1.0, theta=0.3, gamma_g0=0.2)
        first = expansion_coefficients(extreme_rotated, cfg, 20, t=0.0).a
        for t in (0.5, 2.0, 4.1):
            assert_allclose(expansion_coefficients(extreme_rotated, cfg, 20, t=t).a, first, atol=1e-12)

    def test_a_closed_form(self, moderate):
        cfg = WaveConfig(a0=0.6, theta=0.8)
        n = np.arange(6)
        a = expansion_coefficients(moderate, cfg, 5).a
        weights = np.exp(-0.18) * 0.6**n / np.sqrt([1, 1, 2, 6, 24, 120])
        assert_allclose(a, weights * np.exp(-1j * n * 0.8))

    @pytest.mark.parametrize("a0", [0.3, 1.0, 2.0])
    def test_partial_sum_converges(self, moderate, a0):
        cfg = WaveConfig(a0=a0, theta=0.5)
        q = make_grid(moderate, cfg)
        n_max = expansion_order(a0)
        for t in (0.0, 1.3):
            exact = coherent_eigenfunction(moderate, cfg, q, t)
            partial = coherent_from_expansion(moderate, cfg, q, t, n_max)
            assert math.sqrt(grid_norm(partial - exact, q)) <= 1e-6

    def test_fock_expansion(self, extreme):
        cfg = WaveConfig(a0=1.0, theta=0.2, gamma_g0=0.1, gamma_d0=-0.4)
        q = make_grid(extreme, cfg)
        t = 2.2
        exact = coherent_wavefunction(extreme, cfg, q, t)
        partial = coherent_from_fock_expansion(extreme, cfg, q, t, expansion_order(1.0))
        assert math.sqrt(grid_norm(partial - exact, q)) <= 1e-6

    def test_order(self):
        assert expansion_order(0.0) == 20
        assert expansion_order(1.0) == 31

    def test_rejects_bad_order(self, moderate, vacuum):
        with pytest.raises(ParameterError):
            expansion_coefficients(moderate, vacuum, -2)


class TestExpectations:
    def test_invariant(self):
        assert expectation_I(WaveConfig(a0=0.1)) == pytest.approx(0.51)

    def test_invariant_from_q0(self, static):
        cfg = WaveConfig(q0=1.0, amplitude="Q0")
        assert expectation_I(cfg, static) == pytest.approx(1.0)
        with pytest.raises(ParameterError):
            expectation_I(cfg)

    def test_hamiltonian_static_limit(self, static, small_wave):
        assert expectation_H(static, small_wave) == pytest.approx(0.51)
        assert expectation_H(static, small_wave) == pytest.approx(expectation_I(small_wave))

    def test_hamiltonian_moderate(self, moderate, small_wave):
        assert expectation_H(moderate, small_wave) == pytest.approx(0.76)
        assert expectation_H(moderate, small_wave) == pytest.approx(-gamma_d_rate(moderate, small_wave))

    @pytest.mark.slow
    @pytest.mark.parametrize("t", [0.0, 0.7, 2.1])
    def test_hamiltonian_on_grid(self, moderate, t):
        cfg = WaveConfig(a0=0.6, theta=1.2)
        exact = expectation_H(moderate, cfg)
        assert abs(grid_expectation_H(moderate, cfg, t) - exact) / max(1.0, abs(exact)) <= 1e-6

    @pytest.mark.slow
    @pytest.mark.parametrize("t", [0.0, 1.1])
    def test_hamiltonian_on_grid_extreme(self, extreme, t):
        cfg = WaveConfig(a0=1.0)
        exact = expectation_H(extreme, cfg)
        assert abs(grid_expectation_H(extreme, cfg, t) - exact) / max(1.0, abs(exact)) <= 1e-6

    def test_hamiltonian_on_grid_chirped(self):
        p = make_params(10.0, 4.0, phi=0.3)
        cfg = WaveConfig(a0=1.0)
        exact = expectation_H(p, cfg)
        assert abs(grid_expectation_H(p, cfg, 1.1) - exact) / max(1.0, abs(exact)) <= 1e-6


class TestGrid:
    def test_static_keeps_default_size(self, static, vacuum):
        assert len(make_grid(static, vacuum)) == DEFAULT_GRID_POINTS

    def test_size_follows_chirp(self, moderate, extreme):
        cfg = WaveConfig(a0=1.0)
        sizes = [grid_points(p, cfg) for p in (moderate, make_params(10.0, 4.0, phi=0.3), extreme)]
        assert sizes == sorted(sizes)
        assert sizes[0] > DEFAULT_GRID_POINTS
        assert sizes[-1] <= MAX_GRID_POINTS
        assert all(n & (n - 1) == 0 for n in sizes)
        assert len(make_grid(extreme, cfg)) == sizes[-1]

    def test_explicit_size_wins(self, extreme, vacuum):
        assert len(make_grid(extreme, vacuum, 512)) == 512

    def test_cap_is_logged(self, caplog):
        with caplog.at_level(logging.WARNING):
            n = grid_points(make_params(400.0, 400.0), WaveConfig(a0=2.0))
        assert n == MAX_GRID_POINTS
        assert "capped" in caplog.text


class TestFieldGrid:
    def test_frame_and_norm(self, static, vacuum):
        q = np.linspace(-10, 10, 2001)
        field = CoherentWave(static, vacuum).field(q, 0.0)
        assert field.norm() == pytest.approx(1.0, abs=1e-10)
        assert field.inner(field) == pytest.approx(1.0, abs=1e-10)
        assert field.distance(field) == 0.0
        frame = field.to_frame()
        assert list(frame.columns) == ["q", "re", "im", "abs2"]
        assert len(frame) == 2001

    def test_validation(self):
        with pytest.raises(ParameterError):
            FieldGrid(0.0, 1.0, 3, np.zeros(2), 0.0)
        with pytest.raises(ParameterError):
            FieldGrid(1.0, 0.0, 2, np.zeros(2), 0.0)

    def test_inner_needs_same_grid(self):
        a = as_field(np.linspace(0, 1, 5), np.ones(5), 0.0)
        b = as_field(np.linspace(0, 2, 5), np.ones(5), 0.0)
        with pytest.raises(ParameterError):
            a.inner(b)
