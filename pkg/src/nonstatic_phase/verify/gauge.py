"""
Gauge invariance of the geometric phase.

The gauge-invariant form of the geometric phase of a (normalized) state Psi is

    arg <Psi(t0)|Psi(t)> + int_{t0}^{t} <Psi(t')| i d/dt' Psi(t')> dt'

Under Psi -> exp(i alpha(t)) Psi the overlap term gains alpha(t) - alpha(t0)
and the integral loses the same amount. For the coherent wave this form
equals gamma_G(t) - gamma_G(t0) + arg <A(t0)|A(t)> (modulo 2 pi).
"""
import logging
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, interpolate

from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.phases import node_times, resolve_config
from nonstatic_phase.timefunc import require_time
from nonstatic_phase.utils.quadrature import adaptive_quad
from nonstatic_phase.verify.stencils import time_derivative
from nonstatic_phase.wavefunction import CoherentWave, make_grid

logger = logging.getLogger(__name__)

GAUGE_EPSABS = 1e-9
GAUGE_TOL = 1e-6

GaugeFunction = Union[Callable[[float], float], Tuple[Sequence[float], Sequence[float]]]


def gauge_from_samples(times: Sequence[float], values: Sequence[float]) -> Tuple[Callable, Callable]:
    """A gauge function sampled on ``times`` as a cubic spline and its derivative."""
    spline = interpolate.CubicSpline(np.asarray(times, dtype=float), np.asarray(values, dtype=float))
    derivative = spline.derivative()
    return (lambda t: float(spline(t))), (lambda t: float(derivative(t)))


def _resolve_gauge(alpha: Optional[GaugeFunction], alpha_dot: Optional[Callable], h: float):
    if alpha is None:
        return None, None
    if isinstance(alpha, tuple):
        return gauge_from_samples(*alpha)
    if alpha_dot is None:
        return alpha, (lambda t: float(time_derivative(lambda s: np.asarray(alpha(s)), t, h)))
    return alpha, alpha_dot


class _GaugedWave:
    """exp(i alpha(t)) Psi(t) sampled on a fixed q-grid."""

    def __init__(self, wave: CoherentWave, q: np.ndarray, h: float, alpha=None, alpha_dot=None):
        self.wave = wave
        self.q = q
        self.dq = (q[-1] - q[0]) / (len(q) - 1)
        self.h = h
        self.alpha = alpha
        self.alpha_dot = alpha_dot

    def __call__(self, t: float) -> np.ndarray:
        psi = self.wave.wavefunction(self.q, t)
        if self.alpha is None:
            return psi
        return np.exp(1j * self.alpha(t)) * psi

    def connection(self, t: float) -> float:
        """<Psi|i dPsi/dt> / <Psi|Psi> on the grid."""
        psi = self.wave.wavefunction(self.q, t)
        dpsi = time_derivative(lambda s: self.wave.wavefunction(self.q, s), t, self.h)
        if self.alpha is not None:
            phase = np.exp(1j * self.alpha(t))
            dpsi = phase * (dpsi + 1j * self.alpha_dot(t) * psi)
            psi = phase * psi
        num = integrate.trapezoid(np.conj(psi) * 1j * dpsi, dx=self.dq)
        den = integrate.trapezoid(np.abs(psi) ** 2, dx=self.dq)
        return float((num / den).real)

    def overlap(self, t_a: float, t_b: float) -> complex:
        return complex(integrate.trapezoid(np.conj(self(t_a)) * self(t_b), dx=self.dq))


def _geometric_functional(gauged: _GaugedWave, p: NonstaticityParams, cfg: WaveConfig, t: float, epsabs: float) -> float:
    overlap = gauged.overlap(cfg.t0, t)
    integral, _ = adaptive_quad(gauged.connection, cfg.t0, t, breakpoints=node_times(p, cfg, cfg.t0, t), epsabs=epsabs)
    return float(np.angle(overlap)) + integral + cfg.gamma_g0


def gauge_invariance_check(
    p: NonstaticityParams,
    cfg: WaveConfig,
    alpha: Optional[GaugeFunction],
    t: float,
    alpha_dot: Optional[Callable[[float], float]] = None,
    q_grid: Optional[np.ndarray] = None,
    h: Optional[float] = None,
    epsabs: float = GAUGE_EPSABS,
) -> Tuple[float, float]:
    """
    Gauge-invariant geometric phase of the coherent wave Psi and of
    exp(i alpha) Psi, both evaluated on a q-grid.

    Parameters
    ----------
    alpha : callable or (times, values), optional
        The gauge function. Sampled values are interpolated with a cubic
        spline. None means alpha = 0.
    alpha_dot : callable, optional
        Analytic derivative of ``alpha``; central differences otherwise.

    Returns
    -------
    (gamma_G[Psi], gamma_G[exp(i alpha) Psi]), equal up to quadrature error.
    """
    require_time(cfg, t)
    cfg = resolve_config(p, cfg)
    q = make_grid(p, cfg) if q_grid is None else np.asarray(q_grid, dtype=float)
    h = 1e-3 / cfg.omega if h is None else h
    wave = CoherentWave(p, cfg)
    alpha, alpha_dot = _resolve_gauge(alpha, alpha_dot, h)
    plain = _geometric_functional(_GaugedWave(wave, q, h), p, cfg, t, epsabs)
    gauged = _geometric_functional(_GaugedWave(wave, q, h, alpha, alpha_dot), p, cfg, t, epsabs)
    logger.debug(f"gauge check at t={t}: {plain} vs {gauged}")
    return plain, gauged


def overlap_boundary_phase(
    p: NonstaticityParams, cfg: WaveConfig, t: float, q_grid: Optional[np.ndarray] = None
) -> float:
    """arg <A(t0)|A(t)> of the coherent eigenfunctions, by grid quadrature."""
    require_time(cfg, t)
    cfg = resolve_config(p, cfg)
    q = make_grid(p, cfg) if q_grid is None else np.asarray(q_grid, dtype=float)
    wave = CoherentWave(p, cfg, with_phase=False)
    dq = (q[-1] - q[0]) / (len(q) - 1)
    overlap = integrate.trapezoid(np.conj(wave.eigenfunction(q, cfg.t0)) * wave.eigenfunction(q, t), dx=dq)
    return float(np.angle(overlap))
