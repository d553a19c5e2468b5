"""
Input parameters of a nonstatic light wave: the nonstaticity constants
(c1, c2, c3, phi), the medium/wave constants and the amplitude specification.

All types are frozen dataclasses; they validate their invariants at
construction time and can be shared freely between workers.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from ml_collections import config_dict

from nonstatic_phase.exceptions import ConfigError, ParameterError
from nonstatic_phase.utils import conf

logger = logging.getLogger(__name__)

DETERMINANT_TOL = 1e-12


def normalize_angle(phi: float) -> float:
    """Reduce an angle modulo pi into [-pi/2, pi/2)."""
    reduced = math.fmod(phi + math.pi / 2, math.pi)
    if reduced < 0:
        reduced += math.pi
    reduced -= math.pi / 2
    # fmod can land exactly on the excluded upper end after the shift
    if reduced >= math.pi / 2:
        reduced -= math.pi
    return reduced


@dataclass(frozen=True)
class NonstaticityParams:
    """
    Real constants (c1, c2, c3) that give the nonstaticity of the wave and the
    phase ``phi`` of the time function at t0.

    ``phi`` is normalized into [-pi/2, pi/2) on construction; all phases are
    periodic in ``phi`` with period pi.
    """

    c1: float
    c2: float
    c3: float
    phi: float = 0.0

    def __post_init__(self):
        c1, c2, c3 = float(self.c1), float(self.c2), float(self.c3)
        if not (c1 > 0 and c2 > 0):
            raise ParameterError(f"c1 and c2 must be positive, got c1={c1}, c2={c2}")
        if c1 * c2 < 1 - DETERMINANT_TOL:
            raise ParameterError(f"c1*c2 < 1 (c1={c1}, c2={c2}, c1*c2={c1 * c2})")
        if abs(c1 * c2 - c3**2 - 1) > DETERMINANT_TOL * max(1.0, c1 * c2):
            raise ParameterError(
                f"c1*c2 - c3**2 != 1 (c1={c1}, c2={c2}, c3={c3}, "
                f"determinant={c1 * c2 - c3 ** 2})"
            )
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        object.__setattr__(self, "c3", c3)
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))

    @classmethod
    def static(cls) -> "NonstaticityParams":
        return cls(1.0, 1.0, 0.0, 0.0)

    @property
    def determinant(self) -> float:
        return self.c1 * self.c2 - self.c3**2


@dataclass(frozen=True)
class NonstaticityMeasure:
    d: float

    def __float__(self) -> float:
        return self.d


@dataclass(frozen=True)
class WaveConfig:
    """
    Medium and wave constants plus the amplitude specification.

    Exactly one of ``q0`` (classical quadrature amplitude) and ``a0`` (modulus
    of the eigenvalue A) is authoritative, as named by ``amplitude``.
    ``theta`` is the phase of A at t0 and ``theta0`` the classical phase at
    t0; the two are independent inputs.
    """

    epsilon: float = 1.0
    mu: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    t0: float = 0.0
    q0: Optional[float] = None
    a0: Optional[float] = None
    amplitude: str = "A0"
    theta: float = 0.0
    theta0: float = 0.0
    gamma_g0: float = 0.0
    gamma_d0: float = 0.0
    amplitude_warning: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("epsilon", "mu", "omega", "hbar"):
            value = getattr(self, name)
            if not value > 0:
                raise ParameterError(f"{name} must be strictly positive, got {value}")
        if self.amplitude not in ("Q0", "A0"):
            raise ParameterError(f"amplitude must be 'Q0' or 'A0', got {self.amplitude!r}")
        if self.amplitude == "A0":
            if self.a0 is None:
                raise ParameterError("amplitude='A0' requires a0")
            if self.a0 < 0:
                raise ParameterError(f"a0 must be nonnegative, got {self.a0}")
        if self.amplitude == "Q0" and self.q0 is None:
            raise ParameterError("amplitude='Q0' requires q0")

    @property
    def gamma0(self) -> float:
        """Total phase at t0."""
        return self.gamma_g0 + self.gamma_d0

    @property
    def q0_authoritative(self) -> bool:
        return self.amplitude == "Q0"

    def with_amplitude(self, a0: float) -> "WaveConfig":
        return replace(self, a0=a0, amplitude="A0")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def make_params(c1: float, c2: float, sign: int = 1, phi: float = 0.0) -> NonstaticityParams:
    """
    Build nonstaticity parameters with ``c3 = sign * sqrt(c1*c2 - 1)``.

    Parameters
    ----------
    c1, c2 : float
        Positive nonstaticity constants with c1*c2 >= 1.
    sign : {+1, -1}
        Branch of c3.
    phi : float
        Phase of the time function at t0 (any real; reduced mod pi).

    Returns
    -------
    NonstaticityParams
    """
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    if not (c1 > 0 and c2 > 0):
        raise ParameterError(f"c1 and c2 must be positive, got c1={c1}, c2={c2}")
    product = c1 * c2
    if product < 1 - DETERMINANT_TOL:
        raise ParameterError(f"c1*c2 < 1 (c1={c1}, c2={c2}, c1*c2={product})")
    c3 = sign * math.sqrt(max(product - 1.0, 0.0))
    return NonstaticityParams(c1, c2, c3, phi)


def nonstaticity_measure(p: NonstaticityParams) -> NonstaticityMeasure:
    """D = sqrt((c1 + c2)^2 - 4) / (2 sqrt(2)); zero only for c1 = c2 = 1."""
    s = p.c1 + p.c2
    return NonstaticityMeasure(math.sqrt(max(s * s - 4.0, 0.0)) / (2 * math.sqrt(2)))


def omega_from_medium(k: float, epsilon: float, mu: float) -> float:
    """Angular frequency ``k c`` with the wave velocity ``c = 1/sqrt(epsilon mu)``."""
    for name, value in (("k", k), ("epsilon", epsilon), ("mu", mu)):
        if not value > 0:
            raise ParameterError(f"{name} must be strictly positive, got {value}")
    return k / math.sqrt(epsilon * mu)


@conf.as_config_dict
class default_wave:
    """
    Natural units used by every figure: epsilon = mu = hbar = omega = 1, t0 = 0.
    """

    c1: float = 1.0
    c2: float = 1.0
    c3_sign: int = 1
    phi: float = 0.0
    epsilon: float = 1.0
    mu: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    t0: float = 0.0
    theta: float = 0.0
    theta0: float = 0.0
    gamma_G0: float = 0.0
    gamma_D0: float = 0.0


# keys accepted besides the defaults above
_OPTIONAL_KEYS = ("Q0", "A0", "k", "perturb_fddot")


def config_from_mapping(values: Mapping[str, Any]) -> config_dict.ConfigDict:
    """
    Merge user values over the defaults, rejecting unknown keys.
    """
    cfg = default_wave.copy_and_resolve_references()
    known = set(cfg.keys()) | set(_OPTIONAL_KEYS)
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    for key in _OPTIONAL_KEYS:
        cfg[key] = None
    for key, value in values.items():
        try:
            cfg[key] = value
        except TypeError as e:
            raise ConfigError(f"invalid type for {key}: {e}") from e
    return cfg


def load_config(path: Union[str, Path, None] = None, **overrides) -> config_dict.ConfigDict:
    """
    Load a ``key = value`` config file (optional) and apply overrides on top.
    Overrides whose value is None are ignored.
    """
    values = conf.read_kv_file(path) if path is not None else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(values)


def build_inputs(cfg: config_dict.ConfigDict) -> Tuple[NonstaticityParams, WaveConfig]:
    """
    Turn a resolved config into validated parameter objects.

    When both Q0 and A0 are given, A0 wins and a warning is logged and
    recorded in the returned `WaveConfig`.
    """
    try:
        p = make_params(float(cfg.c1), float(cfg.c2), int(cfg.c3_sign), float(cfg.phi))
        omega = float(cfg.omega)
        if cfg.get("k") is not None:
            omega = omega_from_medium(float(cfg.k), float(cfg.epsilon), float(cfg.mu))
        q0, a0 = cfg.get("Q0"), cfg.get("A0")
        warning = None
        if a0 is not None:
            amplitude = "A0"
            if q0 is not None:
                warning = f"both Q0={q0} and A0={a0} given; A0 is used"
                logger.warning(warning)
        elif q0 is not None:
            amplitude = "Q0"
        else:
            amplitude, a0 = "A0", 0.0
        wave = WaveConfig(
            epsilon=float(cfg.epsilon),
            mu=float(cfg.mu),
            omega=omega,
            hbar=float(cfg.hbar),
            t0=float(cfg.t0),
            q0=None if q0 is None else float(q0),
            a0=None if a0 is None else float(a0),
            amplitude=amplitude,
            theta=float(cfg.theta),
            theta0=float(cfg.theta0),
            gamma_g0=float(cfg.gamma_G0),
            gamma_d0=float(cfg.gamma_D0),
            amplitude_warning=warning,
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ParameterError):
            raise
        raise ConfigError(f"invalid config value: {e}") from e
    return p, wave
