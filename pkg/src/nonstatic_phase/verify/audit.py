"""
Constancy audit and the verification suite run by ``nonstatic-phase verify``.

Every check is a module-level function ``check(p, cfg, seed, **options)``
returning ``(metric, tolerance)``; a check passes iff metric <= tolerance.
Checks are independent, so the suite evaluates them concurrently and sorts
the records by name afterwards.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import integrate
from tqdm.auto import tqdm

from nonstatic_phase.exceptions import ConfigError
from nonstatic_phase.params import NonstaticityParams, WaveConfig, make_params
from nonstatic_phase.phases import (
    amplitude_a0,
    eigenvalue_A,
    fock_phases,
    g_functions,
    gamma_d,
    gamma_d_rate,
    gamma_d_rate_at,
    gamma_g,
    gamma_g_rate,
    gamma_total,
    phase_time_T,
    resolve_a0,
    resolve_config,
)
from nonstatic_phase.timefunc import NonstaticTimeFunction, ode_residual, ode_residual_tolerance
from nonstatic_phase.utils.utils import spawn_seeds, tqdm_joblib
from nonstatic_phase.verify.gauge import GAUGE_TOL, gauge_invariance_check
from nonstatic_phase.verify.oracles import quad_gamma_d, quad_gamma_g, quad_T
from nonstatic_phase.verify.residuals import RESIDUAL_TOL, ResidualReport, schrodinger_residual
from nonstatic_phase.wavefunction import (
    HERMITE_N_MAX,
    CoherentWave,
    apply_annihilation,
    coherent_from_expansion,
    expansion_order,
    expectation_H,
    grid_expectation_H,
    make_grid,
)

logger = logging.getLogger(__name__)

CONSTANCY_TOL = 1e-9


@dataclass(frozen=True)
class CheckRecord:
    name: str
    params: Dict[str, Any]
    metric: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.metric <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record["pass"] = self.passed
        return record


def constancy_audit(p: NonstaticityParams, cfg: WaveConfig, n_samples: int = 1000) -> ResidualReport:
    """
    Sample the time-dependent form of Gamma_D and, when Q0 is given, the
    amplitude A0 over three periods and report the largest relative deviation
    from their values at t0.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    t = cfg.t0 + np.linspace(0.0, 3 * math.pi / cfg.omega, n_samples)
    rate = np.asarray(gamma_d_rate_at(p, cfg, t))
    rate_dev = np.abs(rate - rate[0]) / max(1.0, abs(rate[0]))
    deviations = [rate_dev]
    if cfg.q0_authoritative:
        a0 = np.asarray(amplitude_a0(p, cfg, t))
        deviations.append(np.abs(a0 - a0[0]) / max(1.0, a0[0]))
    dev = np.concatenate(deviations)
    return ResidualReport(
        max_abs=float(dev.max()),
        rms=float(np.sqrt(np.mean(dev**2))),
        tolerance_used=CONSTANCY_TOL,
        grid_meta={"n_samples": n_samples, "t_min": float(t[0]), "t_max": float(t[-1]), "with_a0": cfg.q0_authoritative},
    )


# --- checks -------------------------------------------------------------------------


def _sample_times(cfg: WaveConfig, seed: int, n: int, periods: float = 3.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(cfg.t0 + rng.uniform(0.0, periods * math.pi / cfg.omega, n))


def check_ode_residual(p, cfg, seed, **_) -> Tuple[float, float]:
    t = cfg.t0 + np.linspace(0.0, math.pi / cfg.omega, 1000)
    f = NonstaticTimeFunction(p, cfg)(t).f
    return float(np.max(np.abs(ode_residual(p, cfg, t)) / ode_residual_tolerance(p, cfg, f))), 1.0


def check_phase_time_oracle(p, cfg, seed, n_times=20, **_):
    t = _sample_times(cfg, seed, n_times)
    return float(np.max(np.abs(phase_time_T(p, cfg, t) - quad_T(p, cfg, t)))), 1e-9


def check_gamma_g_oracle(p, cfg, seed, n_times=5, **_):
    t = _sample_times(cfg, seed, n_times)
    return float(np.max(np.abs(gamma_g(p, cfg, t) - quad_gamma_g(p, cfg, t)))), 1e-8


def check_gamma_d_oracle(p, cfg, seed, n_times=5, **_):
    t = _sample_times(cfg, seed, n_times)
    return float(np.max(np.abs(gamma_d(p, cfg, t) - quad_gamma_d(p, cfg, t)))), 1e-9


def check_rate_identity(p, cfg, seed, **_):
    t = _sample_times(cfg, seed, 1000)
    f = NonstaticTimeFunction(p, cfg)(t).f
    lhs = gamma_g_rate(p, cfg, t) + gamma_d_rate(p, cfg)
    return float(np.max(np.abs(lhs + cfg.omega / (2 * f)))), 1e-10


def check_g_function_routes(p, cfg, seed, **_):
    t = _sample_times(cfg, seed, 200)
    closed = g_functions(p, cfg, t, route="closed")
    other = g_functions(p, cfg, t, route="amplitude")
    worst = 0.0
    for name in ("g1", "g2", "g3", "g4", "g1_bar"):
        a, b = np.asarray(getattr(closed, name)), np.asarray(getattr(other, name))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a)))))
    return worst, 1e-12


def check_constancy(p, cfg, seed, **_):
    report = constancy_audit(p, cfg, 1000)
    return report.max_abs, report.tolerance_used


def check_harmonization(p, cfg, seed, **_):
    t = _sample_times(cfg, seed, 50)
    reference = gamma_total(p, cfg.with_amplitude(0.0), t).gamma_total
    worst = 0.0
    for a0 in (1.0, 2.0):
        worst = max(worst, float(np.max(np.abs(gamma_total(p, cfg.with_amplitude(a0), t).gamma_total - reference))))
    fock = fock_phases(p, cfg, 0, t).gamma_total
    worst = max(worst, float(np.max(np.abs(fock - reference))))
    return worst, 1e-10


def check_schrodinger_residual(p, cfg, seed, perturb_fddot=None, **_):
    report = schrodinger_residual(p, cfg, perturb_fddot=perturb_fddot)
    return report.max_abs, RESIDUAL_TOL


def check_gauge_invariance(p, cfg, seed, **_):
    t = cfg.t0 + 1.0 / cfg.omega
    worst = 0.0
    gauges = (
        (lambda s: 3 * s, lambda s: 3.0),
        (lambda s: math.sin(2 * s), lambda s: 2 * math.cos(2 * s)),
        (lambda s: 0.5 * s * s, None),
    )
    for alpha, alpha_dot in gauges:
        plain, gauged = gauge_invariance_check(p, cfg, alpha, t, alpha_dot=alpha_dot)
        worst = max(worst, abs(plain - gauged))
    return worst, GAUGE_TOL


def _fields(p, cfg, seed, n_times=3):
    cfg = resolve_config(p, cfg)
    q = make_grid(p, cfg)
    wave = CoherentWave(p, cfg, with_phase=False)
    return cfg, q, [wave.field(q, t) for t in _sample_times(cfg, seed, n_times, periods=1.0)]


def check_wavefunction_norm(p, cfg, seed, **_):
    _, _, fields = _fields(p, cfg, seed)
    return max(abs(field.norm() - 1.0) for field in fields), 1e-8


def check_eigen_relation(p, cfg, seed, **_):
    cfg, _, fields = _fields(p, cfg, seed)
    worst = 0.0
    for field in fields:
        a = eigenvalue_A(p, cfg, field.t).value
        diff = apply_annihilation(p, cfg, field) - a * field.values
        rel = math.sqrt(integrate.trapezoid(np.abs(diff) ** 2, dx=field.dq)) / max(1.0, abs(a))
        worst = max(worst, rel)
    return worst, 1e-6


def check_expansion(p, cfg, seed, **_):
    cfg, q, fields = _fields(p, cfg, seed)
    n_max = expansion_order(resolve_a0(p, cfg))
    if n_max > HERMITE_N_MAX:
        logger.warning(
            f"expansion needs {n_max} Fock terms for A0={cfg.a0:.3g}; truncated at n_max={HERMITE_N_MAX}"
        )
        n_max = HERMITE_N_MAX
    worst = 0.0
    for field in fields:
        partial = coherent_from_expansion(p, cfg, q, field.t, n_max)
        worst = max(worst, math.sqrt(integrate.trapezoid(np.abs(partial - field.values) ** 2, dx=field.dq)))
    return worst, 1e-6


def check_expectation_H(p, cfg, seed, **_):
    exact = expectation_H(p, cfg)
    times = _sample_times(cfg, seed, 3, periods=1.0)
    worst = max(abs(grid_expectation_H(p, cfg, t) - exact) for t in times)
    return worst / max(1.0, abs(exact)), 1e-6


CHECKS: Dict[str, Callable[..., Tuple[float, float]]] = {
    "constancy": check_constancy,
    "eigen_relation": check_eigen_relation,
    "expansion": check_expansion,
    "expectation_H": check_expectation_H,
    "g_function_routes": check_g_function_routes,
    "gamma_d_oracle": check_gamma_d_oracle,
    "gamma_g_oracle": check_gamma_g_oracle,
    "gauge_invariance": check_gauge_invariance,
    "harmonization": check_harmonization,
    "ode_residual": check_ode_residual,
    "phase_time_oracle": check_phase_time_oracle,
    "rate_identity": check_rate_identity,
    "schrodinger_residual": check_schrodinger_residual,
    "wavefunction_norm": check_wavefunction_norm,
}


def random_inputs(seed: int) -> Tuple[NonstaticityParams, WaveConfig]:
    """
    A reproducible random wave: nonstaticity D uniform in [0, 15], c1 and c2
    placed on the c1 + c2 line of that D with c1 c2 >= 1, random angles and
    A0 in [0, 1.5].
    """
    rng = np.random.default_rng(seed)
    d = rng.uniform(0.0, 15.0)
    mean = math.sqrt(2 * d**2 + 1)
    c1 = float(mean + rng.uniform(-0.98, 0.98) * math.sqrt(mean**2 - 1))
    c2 = float(2 * mean - c1)
    sign = int(rng.choice([-1, 1]))
    p = make_params(c1, c2, sign, float(rng.uniform(-math.pi / 2, math.pi / 2)))
    cfg = WaveConfig(a0=float(rng.uniform(0.0, 1.5)), theta=float(rng.uniform(0.0, 2 * math.pi)))
    return p, cfg


def describe_inputs(p: NonstaticityParams, cfg: WaveConfig) -> Dict[str, Any]:
    params = {"c1": p.c1, "c2": p.c2, "c3": p.c3, "phi": p.phi}
    params.update({k: v for k, v in cfg.to_dict().items() if v is not None})
    return params


def _run_check(name: str, p, cfg, seed: int, options: Dict[str, Any]) -> CheckRecord:
    metric, tolerance = CHECKS[name](p, cfg, seed, **options)
    return CheckRecord(name=name, params=describe_inputs(p, cfg), metric=float(metric), tolerance=float(tolerance))


def run_suite(
    p: NonstaticityParams,
    cfg: WaveConfig,
    seed: int = 0,
    n_jobs: int = 1,
    checks: Optional[List[str]] = None,
    perturb_fddot: Optional[float] = None,
    progress: bool = False,
) -> List[CheckRecord]:
    """
    Run the verification checks and return their records sorted by name.

    Parameters
    ----------
    checks : list of str, optional
        Subset of `CHECKS` (default: all).
    perturb_fddot : float, optional
        Scale f_ddot in the Schrodinger residual check (the check is then
        expected to fail).
    """
    names = sorted(checks or CHECKS)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check(s) {unknown}; valid checks are {sorted(CHECKS)}")
    seeds = dict(zip(sorted(CHECKS), spawn_seeds(seed, len(CHECKS))))
    options = {"perturb_fddot": perturb_fddot}
    tasks = [delayed(_run_check)(name, p, cfg, seeds[name], options) for name in names]
    with tqdm_joblib(tqdm(total=len(tasks), desc="verify", disable=not progress)):
        records = Parallel(n_jobs=n_jobs)(tasks)
    records = sorted(records, key=lambda r: r.name)
    for record in records:
        level = logging.INFO if record.passed else logging.WARNING
        logger.log(level, f"{record.name}: metric={record.metric:.3e} tolerance={record.tolerance:.1e} pass={record.passed}")
    return records
