"""
Fock and coherent eigenfunctions of the nonstatic wave in quadrature space,
the phase-carrying wave functions, expansion coefficients and expectation
values.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy import integrate, special

from nonstatic_phase.exceptions import ParameterError
from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.phases import (
    f_extrema,
    fock_phases,
    gamma_d_rate,
    gamma_total,
    phase_time_T,
    resolve_a0,
    resolve_config,
)
from nonstatic_phase.timefunc import NonstaticTimeFunction, TimeFunction, require_time

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

HERMITE_N_MAX = 150
DEFAULT_GRID_POINTS = 4096
MAX_GRID_POINTS = 2**18
GRID_WAVENUMBER_STEP = 0.05
# q-chunk of the basis sums
BASIS_CHUNK = 16384


@dataclass(frozen=True)
class ZetaValue:
    """zeta(t) = epsilon omega / (hbar f(t)), the inverse squared width."""

    zeta: float

    def __post_init__(self):
        if not self.zeta > 0:
            raise ParameterError(f"zeta must be positive, got {self.zeta}")


@dataclass(frozen=True)
class FieldGrid:
    """
    Wave function samples on a uniform q-grid at time ``t``.
    """

    q_min: float
    q_max: float
    n_points: int
    values: np.ndarray
    t: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ParameterError(f"n_points must be >= 2, got {self.n_points}")
        if not self.q_max > self.q_min:
            raise ParameterError(f"q_max must exceed q_min, got [{self.q_min}, {self.q_max}]")
        if np.shape(self.values) != (self.n_points,):
            raise ParameterError(f"expected {self.n_points} samples, got shape {np.shape(self.values)}")

    @property
    def q(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_points)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        """Trapezoid integral of |values|^2."""
        return float(integrate.trapezoid(self.density, dx=self.dq))

    def inner(self, other: "FieldGrid") -> complex:
        """<self|other> by trapezoid quadrature (same grid required)."""
        if (self.q_min, self.q_max, self.n_points) != (other.q_min, other.q_max, other.n_points):
            raise ParameterError("inner product needs both fields on the same grid")
        return complex(integrate.trapezoid(np.conj(self.values) * other.values, dx=self.dq))

    def distance(self, other: "FieldGrid") -> float:
        """Grid L2 norm of the difference."""
        diff = self.values - other.values
        return math.sqrt(integrate.trapezoid(np.abs(diff) ** 2, dx=self.dq))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"q": self.q, "re": self.values.real, "im": self.values.imag, "abs2": self.density}
        )


# --- grids --------------------------------------------------------------------


def grid_half_width(p: NonstaticityParams, cfg: WaveConfig, n: int = 0) -> float:
    """
    Half-width of a q-range holding the widest packet of the period: eight
    widths at f_max (Fock level ``n`` widens it) plus the largest displacement.
    """
    _, f_max = f_extrema(p)
    width = math.sqrt(cfg.hbar * f_max / (cfg.epsilon * cfg.omega))
    a0 = resolve_a0(p, cfg)
    return width * max(8.0, math.sqrt(2 * n + 1) + 6.0) + math.sqrt(2.0) * width * a0


def grid_wavenumber(p: NonstaticityParams, cfg: WaveConfig, n: int = 0) -> float:
    """
    Largest local wavenumber of the packet over one period of f: the Gaussian
    scale sqrt(zeta) plus the chirp zeta |f_dot| q / (2 omega), both taken at
    the packet edge.
    """
    v = NonstaticTimeFunction(p, cfg)(cfg.t0 + np.linspace(0.0, math.pi / cfg.omega, 2049))
    z = cfg.epsilon * cfg.omega / (cfg.hbar * v.f)
    extent = math.sqrt(2 * n + 1) + 3.0 + math.sqrt(2.0) * resolve_a0(p, cfg)
    return float(np.max(np.sqrt(z) * (1.0 + np.abs(v.f_dot) / (2 * cfg.omega)))) * extent


def grid_points(p: NonstaticityParams, cfg: WaveConfig, n: int = 0) -> int:
    """
    Power-of-two grid size keeping k dq <= GRID_WAVENUMBER_STEP at the largest
    local wavenumber, so the 5-point stencils stay accurate as the chirp grows.
    """
    span = 2 * grid_half_width(p, cfg, n) * grid_wavenumber(p, cfg, n)
    needed = 2 ** math.ceil(math.log2(span / GRID_WAVENUMBER_STEP + 1))
    if needed > MAX_GRID_POINTS:
        logger.warning(
            f"q-grid needs {needed} points for c1={p.c1}, c2={p.c2}; capped at {MAX_GRID_POINTS}"
        )
    return int(min(max(needed, DEFAULT_GRID_POINTS), MAX_GRID_POINTS))


def make_grid(
    p: NonstaticityParams, cfg: WaveConfig, n_points: Optional[int] = None, n: int = 0
) -> np.ndarray:
    """
    Uniform q-grid centered on q = 0, fixed over the whole period. Without
    ``n_points`` the size follows `grid_points`.
    """
    if n_points is None:
        n_points = grid_points(p, cfg, n)
    if n_points < 2:
        raise ParameterError(f"n_points must be >= 2, got {n_points}")
    half = grid_half_width(p, cfg, n)
    return np.linspace(-half, half, n_points)


def as_field(q: np.ndarray, values: np.ndarray, t: float) -> FieldGrid:
    q = np.asarray(q, dtype=float)
    return FieldGrid(float(q[0]), float(q[-1]), len(q), np.asarray(values, dtype=complex), float(t))


def zeta(p: NonstaticityParams, cfg: WaveConfig, t: float) -> ZetaValue:
    require_time(cfg, t)
    f = float(NonstaticTimeFunction(p, cfg)(t).f)
    return ZetaValue(cfg.epsilon * cfg.omega / (cfg.hbar * f))


# --- Hermite polynomials ----------------------------------------------------------


def _hermite_stack(n: int, x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 2 * x
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n):
            out[k + 1] = 2 * x * out[k] - 2 * k * out[k - 1]
    return out


def _check_order(n: int, n_max: int) -> None:
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a nonnegative integer, got {n}")
    if n > n_max:
        raise ParameterError(f"n={n} exceeds n_max={n_max}")


def hermite(n: int, x: ArrayLike, n_max: int = HERMITE_N_MAX) -> ArrayLike:
    """
    Physicists' Hermite polynomial H_n(x) by the three-term recurrence
    H_{k+1} = 2x H_k - 2k H_{k-1}.

    Examples
    --------
    >>> hermite(3, 1.0)
    -4.0
    """
    _check_order(n, n_max)
    value = _hermite_stack(int(n), x)[int(n)]
    if np.ndim(x) == 0:
        return float(value)
    return value


def _hermite_functions(n: int, x: np.ndarray) -> np.ndarray:
    """
    g_k = H_k(x) exp(-x^2/2) / sqrt(2^k k!) for k = 0..n by the normalized
    recurrence g_{k+1} = sqrt(2/(k+1)) x g_k - sqrt(k/(k+1)) g_{k-1}, which
    stays finite wherever the Gaussian has not underflowed.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = np.exp(-0.5 * x**2)
    if n >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


# --- Fock states -------------------------------------------------------------------


def _chirp(cfg: WaveConfig, q: np.ndarray, t: float, timefunc: TimeFunction):
    """zeta(t) and the q-dependent phase factor exp(i zeta f_dot q^2 / (4 omega))."""
    v = timefunc(t)
    z = cfg.epsilon * cfg.omega / (cfg.hbar * float(v.f))
    return z, np.exp(1j * z * float(v.f_dot) / (4 * cfg.omega) * q**2)


def fock_basis(
    p: NonstaticityParams,
    cfg: WaveConfig,
    n_max: int,
    q: ArrayLike,
    t: float,
    timefunc: Optional[TimeFunction] = None,
) -> np.ndarray:
    """Eigenfunctions <q|Phi_n(t)> for n = 0..n_max, shape (n_max + 1, len(q))."""
    _check_order(n_max, HERMITE_N_MAX)
    timefunc = timefunc or NonstaticTimeFunction(p, cfg)
    q = np.asarray(q, dtype=float)
    z, chirp = _chirp(cfg, q, t, timefunc)
    return (z / np.pi) ** 0.25 * _hermite_functions(int(n_max), math.sqrt(z) * q) * chirp


def fock_eigenfunction(p: NonstaticityParams, cfg: WaveConfig, n: int, q: ArrayLike, t: float) -> ArrayLike:
    """
    <q|Phi_n(t)> = (zeta/pi)^(1/4) / sqrt(2^n n!) H_n(sqrt(zeta) q)
                   exp[-zeta/2 (1 - i f_dot/(2 omega)) q^2]
    """
    require_time(cfg, t)
    _check_order(n, HERMITE_N_MAX)
    value = fock_basis(p, cfg, int(n), np.atleast_1d(q), t)[int(n)]
    return complex(value[0]) if np.ndim(q) == 0 else value


def fock_wavefunction(p: NonstaticityParams, cfg: WaveConfig, n: int, q: ArrayLike, t: float) -> ArrayLike:
    """Eigenfunction times exp(i gamma_n(t)), gamma_n = -omega (n + 1/2) T(t) + gamma_n(t0)."""
    phase = fock_phases(p, cfg, n, t).gamma_total
    return fock_eigenfunction(p, cfg, n, q, t) * np.exp(1j * phase)


# --- coherent states --------------------------------------------------------------


class CoherentWave:
    """
    The coherent state of a nonstatic wave evaluated through an arbitrary
    `TimeFunction`, without the t >= t0 restriction so that finite-difference
    stencils can straddle t0.

    Parameters
    ----------
    p, cfg : NonstaticityParams, WaveConfig
        A0 is resolved from Q0 on construction if needed.
    timefunc : TimeFunction, optional
        Defaults to the nonstatic time function of ``p``.
    with_phase : bool
        Whether `wavefunction` carries the total phase factor.
    """

    def __init__(
        self,
        p: NonstaticityParams,
        cfg: WaveConfig,
        timefunc: Optional[TimeFunction] = None,
        with_phase: bool = True,
    ):
        self.params = p
        self.cfg = resolve_config(p, cfg)
        self.timefunc = timefunc or NonstaticTimeFunction(p, self.cfg)
        self.with_phase = with_phase

    def amplitude(self, t: float) -> complex:
        cfg = self.cfg
        return cfg.a0 * np.exp(-1j * (cfg.omega * self.timefunc.phase_time(t) + cfg.theta))

    def total_phase(self, t: float) -> float:
        return -0.5 * self.cfg.omega * self.timefunc.phase_time(t) + self.cfg.gamma0

    def eigenfunction(self, q: ArrayLike, t: float) -> np.ndarray:
        """
        <q|A(t)> = (zeta/pi)^(1/4) exp[-zeta/2 (1 - i f_dot/(2 omega)) q^2
                   + sqrt(2 zeta) A q - |A|^2/2 - A^2/2]
        """
        q = np.asarray(q, dtype=float)
        z, chirp = _chirp(self.cfg, q, t, self.timefunc)
        a = self.amplitude(t)
        exponent = -0.5 * z * q**2 + math.sqrt(2 * z) * a * q - 0.5 * abs(a) ** 2 - 0.5 * a**2
        return (z / np.pi) ** 0.25 * np.exp(exponent) * chirp

    def wavefunction(self, q: ArrayLike, t: float) -> np.ndarray:
        values = self.eigenfunction(q, t)
        if self.with_phase:
            values = values * np.exp(1j * self.total_phase(t))
        return values

    def field(self, q: np.ndarray, t: float) -> FieldGrid:
        return as_field(q, self.wavefunction(q, t), t)


def coherent_eigenfunction(p: NonstaticityParams, cfg: WaveConfig, q: ArrayLike, t: float) -> ArrayLike:
    """<q|A(t)>; for A0 = 0 the ground Fock eigenfunction."""
    require_time(cfg, t)
    value = CoherentWave(p, cfg).eigenfunction(np.atleast_1d(q), t)
    return complex(value[0]) if np.ndim(q) == 0 else value


def coherent_wavefunction(p: NonstaticityParams, cfg: WaveConfig, q: ArrayLike, t: float) -> ArrayLike:
    """<q|A(t)> exp(i gamma(t)) with the total phase gamma = -omega T/2 + gamma(t0)."""
    phase = gamma_total(p, cfg, t).gamma_total
    return coherent_eigenfunction(p, cfg, q, t) * np.exp(1j * phase)


# --- expansion in Fock states ----------------------------------------------------------


@dataclass(frozen=True)
class ExpansionCoefficients:
    """
    ``b``: <Phi_n(t)|A(t)>, time dependent.
    ``a``: coefficients of the full wave function on the phase-carrying Fock
    states, time constant.
    """

    t: float
    b: np.ndarray
    a: np.ndarray


def expansion_coefficients(
    p: NonstaticityParams,
    cfg: WaveConfig,
    n_max: int,
    t: Optional[float] = None,
    gamma_n0: Optional[float] = None,
) -> ExpansionCoefficients:
    """
    b_n = exp(-A0^2/2) A^n / sqrt(n!) at time ``t`` (default t0), and
    a_n = b_n exp(i [gamma(t) - gamma_n(t)]), which reduces to
    exp(-A0^2/2) A0^n / sqrt(n!) exp(-i [gamma_n(t0) - gamma(t0)] - i n theta).

    ``gamma_n0`` is the initial Fock phase (default gamma(t0)).
    """
    if int(n_max) != n_max or n_max < 0:
        raise ParameterError(f"n_max must be a nonnegative integer, got {n_max}")
    t = cfg.t0 if t is None else t
    require_time(cfg, t)
    a0 = resolve_a0(p, cfg)
    n = np.arange(int(n_max) + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_modulus = -0.5 * a0**2 + n * np.log(a0) - 0.5 * special.gammaln(n + 1)
    modulus = np.where(n == 0, math.exp(-0.5 * a0**2), np.exp(log_modulus))
    T = phase_time_T(p, cfg, t)
    b = modulus * np.exp(-1j * n * (cfg.omega * T + cfg.theta))
    gamma_n0 = cfg.gamma0 if gamma_n0 is None else gamma_n0
    coherent_total = -0.5 * cfg.omega * T + cfg.gamma0
    fock_total = -(n + 0.5) * cfg.omega * T + gamma_n0
    a = b * np.exp(1j * (coherent_total - fock_total))
    return ExpansionCoefficients(t=t, b=b, a=a)


def expansion_order(a0: float) -> int:
    """N = ceil(A0^2 + 10 A0 + 20), enough terms for a 1e-6 grid distance."""
    return int(math.ceil(a0**2 + 10 * a0 + 20))


def _basis_sum(
    p: NonstaticityParams, cfg: WaveConfig, weights: np.ndarray, q: ArrayLike, t: float
) -> np.ndarray:
    """sum_n weights[n] <q|Phi_n(t)>, evaluated BASIS_CHUNK samples of q at a time."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n_max = len(weights) - 1
    timefunc = NonstaticTimeFunction(p, cfg)
    out = np.empty(q.shape, dtype=complex)
    for start in range(0, len(q), BASIS_CHUNK):
        chunk = slice(start, start + BASIS_CHUNK)
        out[chunk] = weights @ fock_basis(p, cfg, n_max, q[chunk], t, timefunc)
    return out


def coherent_from_expansion(
    p: NonstaticityParams, cfg: WaveConfig, q: ArrayLike, t: float, n_max: int
) -> np.ndarray:
    """Partial sum of b_n <q|Phi_n(t)> for n <= n_max."""
    coeffs = expansion_coefficients(p, cfg, n_max, t)
    return _basis_sum(p, cfg, coeffs.b, q, t)


def coherent_from_fock_expansion(
    p: NonstaticityParams, cfg: WaveConfig, q: ArrayLike, t: float, n_max: int
) -> np.ndarray:
    """
    Partial sum of a_n <q|Psi_n(t)> with the time-constant a_n and the
    phase-carrying Fock wave functions; converges to `coherent_wavefunction`.
    """
    coeffs = expansion_coefficients(p, cfg, n_max, cfg.t0)
    T = phase_time_T(p, cfg, t)
    n = np.arange(int(n_max) + 1)
    fock_phase = -(n + 0.5) * cfg.omega * T + cfg.gamma0
    return _basis_sum(p, cfg, coeffs.a * np.exp(1j * fock_phase), q, t)


# --- expectation values -----------------------------------------------------------------


def expectation_I(cfg: WaveConfig, p: Optional[NonstaticityParams] = None) -> float:
    """<A|I|A> = hbar omega (A0^2 + 1/2); ``p`` is only needed when Q0 is given."""
    if cfg.q0_authoritative:
        if p is None:
            raise ParameterError("expectation_I needs the nonstaticity params to resolve A0 from Q0")
        a0 = resolve_a0(p, cfg)
    else:
        a0 = cfg.a0
    return cfg.hbar * cfg.omega * (a0**2 + 0.5)


def expectation_H(p: NonstaticityParams, cfg: WaveConfig) -> float:
    """<A|H|A> = -hbar Gamma_D, a time constant."""
    return -cfg.hbar * gamma_d_rate(p, cfg)


def grid_expectation_H(
    p: NonstaticityParams, cfg: WaveConfig, t: float, n_points: Optional[int] = None
) -> float:
    """
    <A|H|A> by quadrature of the quadrature-space Hamiltonian
    -hbar^2/(2 epsilon) d^2/dq^2 + epsilon omega^2 q^2 / 2 on a q-grid.
    """
    from nonstatic_phase.verify.stencils import second_derivative

    require_time(cfg, t)
    q = make_grid(p, cfg, n_points)
    field = CoherentWave(p, cfg).field(q, t)
    psi = field.values
    h_psi = -(cfg.hbar**2) / (2 * cfg.epsilon) * second_derivative(psi, field.dq) + 0.5 * cfg.epsilon * cfg.omega**2 * q**2 * psi
    value = integrate.trapezoid(np.conj(psi) * h_psi, dx=field.dq)
    if abs(value.imag) > 1e-6 * max(1.0, abs(value.real)):
        logger.warning(f"<H> on the grid has an imaginary part {value.imag:.3e}")
    return float(value.real)


def apply_annihilation(p: NonstaticityParams, cfg: WaveConfig, field: FieldGrid) -> np.ndarray:
    """
    The annihilation operator in quadrature space applied to grid samples:

        A = sqrt(eps w/(2 hbar f)) (1 - i f_dot/(2 w)) q + sqrt(hbar f/(2 eps w)) d/dq
    """
    from nonstatic_phase.verify.stencils import first_derivative

    v = NonstaticTimeFunction(p, cfg)(field.t)
    f, f_dot = float(v.f), float(v.f_dot)
    e, w, h = cfg.epsilon, cfg.omega, cfg.hbar
    return np.sqrt(e * w / (2 * h * f)) * (1 - 1j * f_dot / (2 * w)) * field.q * field.values + np.sqrt(
        h * f / (2 * e * w)
    ) * first_derivative(field.values, field.dq)
