"""
Quadrature oracles: the integral definitions of T, gamma_G and gamma_D
evaluated numerically, independent of the closed forms in `phases`.

Panels are split at the node instants, where 1/f and the rate integrands peak.
"""
import logging
from typing import Callable

import numpy as np

from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.phases import gamma_d_rate_at, gamma_g_rate, node_times
from nonstatic_phase.timefunc import NonstaticTimeFunction, require_time
from nonstatic_phase.utils.quadrature import adaptive_quad

logger = logging.getLogger(__name__)

ORACLE_EPSABS = 1e-11


def _integrate(p: NonstaticityParams, cfg: WaveConfig, integrand: Callable[[float], float], t, epsabs: float):
    require_time(cfg, t)

    def one(t_end: float) -> float:
        nodes = node_times(p, cfg, cfg.t0, t_end)
        value, abserr = adaptive_quad(integrand, cfg.t0, t_end, breakpoints=nodes, epsabs=epsabs)
        logger.debug(f"oracle [{cfg.t0}, {t_end}]: {value} +- {abserr:.2e}")
        return value

    if np.ndim(t) == 0:
        return one(float(t))
    return np.array([one(float(s)) for s in np.ravel(t)]).reshape(np.shape(t))


def quad_T(p: NonstaticityParams, cfg: WaveConfig, t, epsabs: float = ORACLE_EPSABS):
    """T(t) = int_{t0}^{t} dt'/f(t') by adaptive quadrature."""
    timefunc = NonstaticTimeFunction(p, cfg)
    return _integrate(p, cfg, lambda s: 1.0 / float(timefunc(s).f), t, epsabs)


def quad_gamma_g(p: NonstaticityParams, cfg: WaveConfig, t, epsabs: float = ORACLE_EPSABS):
    """gamma_G(t) = int Gamma_G dt' + gamma_G(t0)."""
    integral = _integrate(p, cfg, lambda s: float(gamma_g_rate(p, cfg, s)), t, epsabs)
    return integral + cfg.gamma_g0


def quad_gamma_d(p: NonstaticityParams, cfg: WaveConfig, t, epsabs: float = ORACLE_EPSABS):
    """gamma_D(t) = int Gamma_D(t') dt' + gamma_D(t0), the rate taken in its time-dependent form."""
    integral = _integrate(p, cfg, lambda s: float(gamma_d_rate_at(p, cfg, s)), t, epsabs)
    return integral + cfg.gamma_d0
