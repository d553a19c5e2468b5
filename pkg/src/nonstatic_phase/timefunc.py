"""
The nonstatic time function f(t), its derivatives, the nonlinear equation it
obeys, and the classical trajectory of the quadrature variable.

    f(t) = c1 sin^2(x) + c2 cos^2(x) + c3 sin(2x),   x = omega (t - t0) + phi
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Union

import numpy as np

from nonstatic_phase.exceptions import ParameterError
from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.utils.quadrature import adaptive_quad

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class TimeFunctionValue:
    f: ArrayLike
    f_dot: ArrayLike
    f_ddot: ArrayLike


def require_time(cfg: WaveConfig, t: ArrayLike) -> None:
    """Only t >= t0 is considered throughout."""
    if np.any(np.asarray(t) < cfg.t0):
        raise ParameterError(f"t must be >= t0={cfg.t0}, got {t}")


class TimeFunction(ABC):
    """
    A positive time function together with its phase time
    T(t) = int_{t0}^{t} dt'/f(t').
    """

    def __init__(self, params: NonstaticityParams, cfg: WaveConfig):
        self.params = params
        self.cfg = cfg

    @abstractmethod
    def __call__(self, t: ArrayLike) -> TimeFunctionValue:
        ...

    @abstractmethod
    def phase_time(self, t: ArrayLike) -> ArrayLike:
        ...


class NonstaticTimeFunction(TimeFunction):
    """
    The three-parameter family above with closed-form derivatives.
    Accepts scalars or numpy arrays.
    """

    def argument(self, t: ArrayLike) -> ArrayLike:
        return self.cfg.omega * (np.asarray(t, dtype=float) - self.cfg.t0) + self.params.phi

    def __call__(self, t: ArrayLike) -> TimeFunctionValue:
        p, w = self.params, self.cfg.omega
        x = self.argument(t)
        s2, c2x = np.sin(2 * x), np.cos(2 * x)
        f = p.c1 * np.sin(x) ** 2 + p.c2 * np.cos(x) ** 2 + p.c3 * s2
        f_dot = w * ((p.c1 - p.c2) * s2 + 2 * p.c3 * c2x)
        f_ddot = 2 * w**2 * ((p.c1 - p.c2) * c2x - 2 * p.c3 * s2)
        return TimeFunctionValue(f, f_dot, f_ddot)

    def phase_time(self, t: ArrayLike) -> ArrayLike:
        from nonstatic_phase.phases import branch_phase_time

        return branch_phase_time(self.params, self.cfg, t)


class PerturbedTimeFunction(TimeFunction):
    """
    A time function whose second derivative is scaled by ``scale`` relative to
    the nonstatic one, matching f and f_dot at t0:

        g(t) = f(t0) + f_dot(t0)(t - t0) + scale [f(t) - f(t0) - f_dot(t0)(t - t0)]

    It no longer satisfies the nonlinear equation of f. Its phase time is
    obtained by adaptive quadrature of 1/g, so that dT/dt = 1/g still holds.
    Only meant for short windows after t0 where g stays positive.
    """

    def __init__(self, params: NonstaticityParams, cfg: WaveConfig, scale: float = 1.01):
        super().__init__(params, cfg)
        self.scale = float(scale)
        self.base = NonstaticTimeFunction(params, cfg)
        start = self.base(cfg.t0)
        self._f0, self._fdot0 = float(start.f), float(start.f_dot)

    def __call__(self, t: ArrayLike) -> TimeFunctionValue:
        t = np.asarray(t, dtype=float)
        base = self.base(t)
        dt = t - self.cfg.t0
        linear = self._f0 + self._fdot0 * dt
        f = linear + self.scale * (base.f - linear)
        f_dot = self._fdot0 + self.scale * (base.f_dot - self._fdot0)
        if np.any(f <= 0):
            raise ParameterError("perturbed time function is not positive on the requested window")
        return TimeFunctionValue(f, f_dot, self.scale * base.f_ddot)

    def _phase_time_scalar(self, t: float) -> float:
        value, _ = adaptive_quad(lambda s: 1.0 / float(self(s).f), self.cfg.t0, t, epsabs=1e-13)
        return value

    def phase_time(self, t: ArrayLike) -> ArrayLike:
        if np.ndim(t) == 0:
            return self._phase_time_scalar(float(t))
        return np.array([self._phase_time_scalar(float(s)) for s in np.ravel(t)]).reshape(np.shape(t))


def eval_f(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> TimeFunctionValue:
    """
    Evaluate f(t) with its analytic first and second derivatives.

    Examples
    --------
    >>> eval_f(make_params(2.5, 0.5), WaveConfig(a0=0.0), 0.0).f
    0.5
    """
    require_time(cfg, t)
    return NonstaticTimeFunction(p, cfg)(t)


def ode_residual(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    Residual of f_ddot = f_dot^2/(2f) - 2 omega^2 (f - 1/f), the necessary
    condition for the wave function to satisfy the Schrodinger equation.
    """
    require_time(cfg, t)
    v = NonstaticTimeFunction(p, cfg)(t)
    return v.f_ddot - (v.f_dot**2 / (2 * v.f) - 2 * cfg.omega**2 * (v.f - 1 / v.f))


def ode_residual_tolerance(p: NonstaticityParams, cfg: WaveConfig, f: ArrayLike) -> ArrayLike:
    """
    Scaled tolerance 1e-9 max(1, omega^2 f max(1, c1, c2)) of the residual
    contract; the extra max(1, c1, c2) covers the cancellation between the
    O(omega^2 c) terms of f_ddot and f_dot^2/(2f).
    """
    return 1e-9 * np.maximum(1.0, cfg.omega**2 * np.asarray(f) * max(1.0, p.c1, p.c2))


def _require_q0(cfg: WaveConfig) -> float:
    if not cfg.q0_authoritative:
        raise ParameterError("the classical trajectory requires Q0 to be authoritative (only A0 given)")
    return float(cfg.q0)


def classical_trajectory(cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """Q_cl(t) = Q0 cos(omega (t - t0) + theta0)."""
    require_time(cfg, t)
    q0 = _require_q0(cfg)
    return q0 * np.cos(cfg.omega * (np.asarray(t, dtype=float) - cfg.t0) + cfg.theta0)


def classical_momentum(cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """P_cl(t) = epsilon dQ_cl/dt."""
    require_time(cfg, t)
    q0 = _require_q0(cfg)
    return -cfg.epsilon * cfg.omega * q0 * np.sin(cfg.omega * (np.asarray(t, dtype=float) - cfg.t0) + cfg.theta0)
