"""
Geometric, dynamical and total phases of the nonstatic coherent state, and
the Fock-state phases they are compared with.

All functions are vectorized over ``t`` and return unwrapped phases (no
reduction modulo 2 pi; see `wrap_phase` for display).
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Tuple, Union

import numpy as np

from nonstatic_phase.exceptions import ParameterError
from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.timefunc import (
    NonstaticTimeFunction,
    classical_momentum,
    classical_trajectory,
    require_time,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

A0_CONSTANCY_TOL = 1e-9


@dataclass(frozen=True)
class ComplexAmplitude:
    """
    The eigenvalue A(t) = a0 exp(-i accumulated_phase) with
    accumulated_phase = omega T(t) + theta.
    """

    a0: float
    accumulated_phase: ArrayLike

    @property
    def value(self) -> Union[complex, np.ndarray]:
        return self.a0 * np.exp(-1j * np.asarray(self.accumulated_phase))


@dataclass(frozen=True)
class PhaseSample:
    """
    Phases at time(s) ``t``. ``gamma_nl`` is the periodic nonlinear part,
    shared by the geometric and the total phase, and ``gamma_l`` the linear
    part of the geometric phase, so that gamma_g = gamma_nl + gamma_l.
    """

    t: ArrayLike
    gamma_g: ArrayLike
    gamma_d: ArrayLike
    gamma_total: ArrayLike
    gamma_nl: ArrayLike
    gamma_l: ArrayLike

    def to_dict(self) -> Dict[str, ArrayLike]:
        return asdict(self)


@dataclass(frozen=True)
class GFunctions:
    g1: ArrayLike
    g2: ArrayLike
    g3: ArrayLike
    g4: ArrayLike
    g1_bar: ArrayLike


# --- phase time -------------------------------------------------------------


def f_extrema(p: NonstaticityParams) -> Tuple[float, float]:
    """
    (f_min, f_max) = (c1 + c2)/2 -/+ sqrt(((c1 + c2)/2)^2 - 1). The product is
    1, so the wave packet narrows by exactly the factor it widens.
    """
    mean = (p.c1 + p.c2) / 2
    spread = math.sqrt(max(mean * mean - 1.0, 0.0))
    f_max = mean + spread
    return 1.0 / f_max, f_max


def node_count(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    Number of nodes omega (t - t0) = (2m + 1) pi/2 - phi (m >= 0) passed at t.
    A node instant itself is counted (right-continuous step).
    """
    x = cfg.omega * (np.asarray(t, dtype=float) - cfg.t0) + p.phi
    return np.floor((x + np.pi / 2) / np.pi)


def node_times(p: NonstaticityParams, cfg: WaveConfig, t_start: float, t_end: float) -> np.ndarray:
    """Node instants within [t_start, t_end] (t_start >= t0)."""
    require_time(cfg, t_start)
    m_first = max(0, math.ceil(((cfg.omega * (t_start - cfg.t0) + p.phi) / np.pi) - 0.5))
    times = []
    m = m_first
    while True:
        t = cfg.t0 + ((2 * m + 1) * np.pi / 2 - p.phi) / cfg.omega
        if t > t_end:
            break
        if t >= t_start:
            times.append(t)
        m += 1
    return np.array(times, dtype=float)


def _principal_g(p: NonstaticityParams, y: np.ndarray) -> np.ndarray:
    # y in [-pi/2, pi/2); tan(-pi/2) is the limit from the right
    with np.errstate(over="ignore"):
        g = np.arctan(p.c3 + p.c1 * np.tan(y))
    return np.where(y <= -np.pi / 2, -np.pi / 2, g)


def branch_phase_time(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    Continuous phase time T(t) = G(t) - G(t0) + (node steps)/omega without
    the t >= t0 check. G uses the principal arctan branch on the reduced
    argument and every node adds pi.
    """
    t_arr = np.asarray(t, dtype=float)
    x = cfg.omega * (t_arr - cfg.t0) + p.phi
    k = np.floor((x + np.pi / 2) / np.pi)
    y = x - k * np.pi
    g = _principal_g(p, y)
    g0 = _principal_g(p, np.asarray(p.phi))
    value = (g + k * np.pi - g0) / cfg.omega
    if np.ndim(t) == 0:
        return float(value)
    return value


def phase_time_T(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    T(t) = int_{t0}^{t} dt'/f(t'): continuous, strictly increasing, T(t0) = 0.

    Examples
    --------
    For static parameters T(t) = t - t0. Over a half-period pi/omega the phase
    time advances by exactly pi/omega for any valid parameters.
    """
    require_time(cfg, t)
    return branch_phase_time(p, cfg, t)


# --- amplitude and eigenvalue -------------------------------------------------


def amplitude_a0(p: NonstaticityParams, cfg: WaveConfig, t_eval: ArrayLike = None) -> ArrayLike:
    """
    Modulus A0 of the eigenvalue from the classical amplitude Q0, evaluated at
    ``t_eval`` (default t0). A0 does not depend on ``t_eval``.
    """
    if not cfg.q0_authoritative:
        raise ParameterError("amplitude_a0 requires Q0 to be authoritative (A0 was given directly)")
    t_eval = cfg.t0 if t_eval is None else t_eval
    require_time(cfg, t_eval)
    v = NonstaticTimeFunction(p, cfg)(t_eval)
    theta_t = cfg.omega * (np.asarray(t_eval, dtype=float) - cfg.t0) + cfg.theta0
    sqrt_f = np.sqrt(v.f)
    bracket = np.cos(theta_t) ** 2 / v.f + (
        v.f_dot / (2 * cfg.omega * sqrt_f) * np.cos(theta_t) + sqrt_f * np.sin(theta_t)
    ) ** 2
    a0 = np.sqrt(cfg.epsilon * cfg.omega / (2 * cfg.hbar) * bracket) * abs(cfg.q0)
    if np.ndim(a0) == 0:
        return float(a0)
    return a0


def resolve_a0(p: NonstaticityParams, cfg: WaveConfig, check: bool = False) -> float:
    """
    A0 as given, or computed from Q0 at t0. With ``check`` the t-independence
    is verified at a second instant and a warning is logged if it fails.
    """
    if not cfg.q0_authoritative:
        return float(cfg.a0)
    a0 = amplitude_a0(p, cfg, cfg.t0)
    if check:
        other = amplitude_a0(p, cfg, cfg.t0 + 0.9 / cfg.omega)
        if abs(other - a0) > A0_CONSTANCY_TOL * max(1.0, a0):
            logger.warning(f"A0 is not time constant: {a0} at t0 vs {other} at t0+0.9/omega")
    return a0


def resolve_config(p: NonstaticityParams, cfg: WaveConfig) -> WaveConfig:
    """The same config with A0 authoritative (computed from Q0 if needed)."""
    if not cfg.q0_authoritative:
        return cfg
    return cfg.with_amplitude(resolve_a0(p, cfg, check=True))


def amplitude_from_trajectory(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    A(t) obtained by applying the annihilation operator to the classical
    trajectory (Q_cl, P_cl). Its modulus is A0.
    """
    q = classical_trajectory(cfg, t)
    mom = classical_momentum(cfg, t)
    v = NonstaticTimeFunction(p, cfg)(t)
    e, w, h = cfg.epsilon, cfg.omega, cfg.hbar
    return np.sqrt(e * w / (2 * h * v.f)) * (1 - 1j * v.f_dot / (2 * w)) * q + 1j * np.sqrt(
        v.f / (2 * e * w * h)
    ) * mom


def eigenvalue_A(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ComplexAmplitude:
    """A(t) = A0 exp(-i [omega T(t) + theta])."""
    a0 = resolve_a0(p, cfg)
    return ComplexAmplitude(a0, cfg.omega * phase_time_T(p, cfg, t) + cfg.theta)


def number_expectation(p: NonstaticityParams, cfg: WaveConfig) -> float:
    """<A|A^dagger A|A> = A0^2, the coherent counterpart of the Fock number n."""
    return resolve_a0(p, cfg) ** 2


# --- rate integrands ----------------------------------------------------------


def g_functions(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike, route: str = "closed") -> GFunctions:
    """
    Rate-integrand coefficients g1..g4 and g1_bar.

    Parameters
    ----------
    route : {"closed", "amplitude"}
        "closed" uses the trigonometric closed forms in A0 and omega T + theta,
        "amplitude" substitutes the complex eigenvalue A and its conjugate.
        Both give the same values.
    """
    require_time(cfg, t)
    v = NonstaticTimeFunction(p, cfg)(t)
    amp = eigenvalue_A(p, cfg, t)
    f, f_dot = v.f, v.f_dot
    if route == "closed":
        a2 = amp.a0**2
        c = 2 * a2 * np.cos(2 * np.asarray(amp.accumulated_phase))
        s = np.sin(2 * np.asarray(amp.accumulated_phase))
        g1 = -(c - 2 * a2 + 1) / f
        g2 = f_dot**2 / f * (c + 2 * a2 + 1)
        g3 = -2 * f_dot / f * a2 * s
        g4 = f * (c + 2 * a2 + 1)
        g1_bar = -(c - 2 * a2 - 1) / f
    elif route == "amplitude":
        A = amp.value
        Ac = np.conj(A)
        sq = (A**2 + Ac**2).real
        nn = (Ac * A).real
        g1 = -(sq - 2 * nn + 1) / f
        g2 = f_dot**2 / f * (sq + 2 * nn + 1)
        g3 = (1j * f_dot / f * (-(A**2) + Ac**2)).real
        g4 = f * (sq + 2 * nn + 1)
        g1_bar = -(sq - 2 * nn - 1) / f
    else:
        raise ValueError(f"unknown route {route!r}; use 'closed' or 'amplitude'")
    return GFunctions(g1, g2, g3, g4, g1_bar)


def gamma_g_rate(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """Geometric-phase rate Gamma_G(t) = w/4 g1 + g2/(16 w) + g3/4 + w/4 g4."""
    w = cfg.omega
    g = g_functions(p, cfg, t)
    return w / 4 * g.g1 + g.g2 / (16 * w) + g.g3 / 4 + w / 4 * g.g4


def gamma_d_rate_at(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """
    Dynamical-phase rate written as a function of time. It is a time constant;
    this form is used to check that.
    """
    w = cfg.omega
    g = g_functions(p, cfg, t)
    return -(w / 4 * g.g1_bar + g.g2 / (16 * w) + g.g3 / 4 + w / 4 * g.g4)


def kappa(p: NonstaticityParams) -> Tuple[float, float]:
    """(kappa1, kappa2) = (f(t0), f_dot(t0)/omega) for the chosen c3 branch."""
    phi = p.phi
    k1 = p.c1 * math.sin(phi) ** 2 + p.c2 * math.cos(phi) ** 2 + p.c3 * math.sin(2 * phi)
    k2 = (p.c1 - p.c2) * math.sin(2 * phi) + 2 * p.c3 * math.cos(2 * phi)
    return k1, k2


def gamma_d_rate(p: NonstaticityParams, cfg: WaveConfig) -> float:
    """
    Gamma_D, the (constant) dynamical-phase rate, evaluated at t = t0:

        -w/(16 k1) [4(1 + 4A0^2 sin^2 th) + (1 + 4A0^2 cos^2 th)(4 k1^2 + k2^2)
                    - 8 A0^2 sin(2 th) k2]
    """
    a2 = resolve_a0(p, cfg) ** 2
    k1, k2 = kappa(p)
    th = cfg.theta
    return -cfg.omega / (16 * k1) * (
        4 * (1 + 4 * a2 * math.sin(th) ** 2)
        + (1 + 4 * a2 * math.cos(th) ** 2) * (4 * k1**2 + k2**2)
        - 8 * a2 * math.sin(2 * th) * k2
    )


def gamma_d_rate_static_angles(p: NonstaticityParams, cfg: WaveConfig) -> float:
    """Gamma_D for phi = theta = 0: -w [(c1 + c2)/4 + A0^2 (c1 + c2 - 1/c2)]."""
    a2 = resolve_a0(p, cfg) ** 2
    s = p.c1 + p.c2
    return -cfg.omega * (s / 4 + a2 * (s - 1 / p.c2))


# --- phases -------------------------------------------------------------------


def gamma_g(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """gamma_G(t) = -w T(t)/2 - Gamma_D (t - t0) + gamma_G(t0)."""
    T = phase_time_T(p, cfg, t)
    return -0.5 * cfg.omega * T - gamma_d_rate(p, cfg) * (np.asarray(t, dtype=float) - cfg.t0) + cfg.gamma_g0


def gamma_d(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> ArrayLike:
    """gamma_D(t) = Gamma_D (t - t0) + gamma_D(t0)."""
    require_time(cfg, t)
    return gamma_d_rate(p, cfg) * (np.asarray(t, dtype=float) - cfg.t0) + cfg.gamma_d0


def gamma_total(p: NonstaticityParams, cfg: WaveConfig, t: ArrayLike) -> PhaseSample:
    """
    Total phase gamma = gamma_G + gamma_D = -w T(t)/2 + gamma(t0), with its
    nonlinear/linear decomposition.
    """
    w = cfg.omega
    T = phase_time_T(p, cfg, t)
    dt = np.asarray(t, dtype=float) - cfg.t0
    rate = gamma_d_rate(p, cfg)
    g_nl = -0.5 * w * (T - dt)
    g_l = -(rate + 0.5 * w) * dt + cfg.gamma_g0
    g_g = g_nl + g_l
    g_d = rate * dt + cfg.gamma_d0
    return PhaseSample(t=t, gamma_g=g_g, gamma_d=g_d, gamma_total=-0.5 * w * T + cfg.gamma0, gamma_nl=g_nl, gamma_l=g_l)


def fock_phases(p: NonstaticityParams, cfg: WaveConfig, n: int, t: ArrayLike) -> PhaseSample:
    """
    Phases of the nonstatic Fock state |n>:

        gamma_G,n = (n + 1/2) [(c1 + c2)/2 w (t - t0) - w T(t)]
        gamma_D,n = -(n + 1/2) (c1 + c2)/2 w (t - t0)
        gamma_n   = -(n + 1/2) w T(t)

    plus the initial offsets gamma_G(t0), gamma_D(t0) of ``cfg``.
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a nonnegative integer, got {n}")
    w = cfg.omega
    T = phase_time_T(p, cfg, t)
    dt = np.asarray(t, dtype=float) - cfg.t0
    level = n + 0.5
    mean_f = (p.c1 + p.c2) / 2
    g_g = level * (mean_f * w * dt - w * T) + cfg.gamma_g0
    g_d = -level * mean_f * w * dt + cfg.gamma_d0
    g_nl = -level * w * (T - dt)
    return PhaseSample(
        t=t,
        gamma_g=g_g,
        gamma_d=g_d,
        gamma_total=-level * w * T + cfg.gamma0,
        gamma_nl=g_nl,
        gamma_l=g_g - g_nl,
    )


def wrap_phase(x: ArrayLike) -> ArrayLike:
    """Reduce phases to (-pi, pi] for display."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


# --- slope comparison with the Fock states --------------------------------------


def average_slopes(p: NonstaticityParams, cfg: WaveConfig, n: int) -> Tuple[float, float]:
    """
    Average growth rates over a period of the coherent geometric phase and of
    the Fock geometric phase with quantum number ``n``. T advances by the
    elapsed time over every half-period, so the nonlinear parts average out.
    """
    w = cfg.omega
    coherent = -0.5 * w - gamma_d_rate(p, cfg)
    fock = (n + 0.5) * w * ((p.c1 + p.c2) / 2 - 1)
    return coherent, fock


def matching_c2(c1: float) -> float:
    """
    c2 at which, for phi = theta = 0 and A0^2 = n > 0, the coherent and Fock
    geometric phases grow at the same average rate:
    c2^2 + (c1 + 2) c2 - 2 = 0.
    """
    if not c1 > 0:
        raise ParameterError(f"c1 must be positive, got {c1}")
    b = c1 + 2
    return (-b + math.sqrt(b * b + 8)) / 2
