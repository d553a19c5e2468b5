"""
Schrodinger-equation residual of the coherent wave function on a (t, q) grid.

    R = i hbar dPsi/dt + hbar^2/(2 epsilon) d2Psi/dq2 - epsilon omega^2 q^2/2 Psi

Both derivatives use 5-point central stencils. The residual is reported
relative to the grid norm of H Psi at every sampled time.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy import integrate

from nonstatic_phase.exceptions import ResolutionError
from nonstatic_phase.params import NonstaticityParams, WaveConfig
from nonstatic_phase.phases import resolve_config
from nonstatic_phase.timefunc import PerturbedTimeFunction, require_time
from nonstatic_phase.verify.stencils import second_derivative, time_derivative
from nonstatic_phase.wavefunction import CoherentWave, make_grid

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-5
MIN_REFINEMENT_GAIN = 4.0


@dataclass(frozen=True)
class ResidualReport:
    """
    Outcome of a numerical check. ``passed`` holds iff
    ``max_abs <= tolerance_used``.
    """

    max_abs: float
    rms: float
    tolerance_used: float
    grid_meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_abs <= self.tolerance_used)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_abs": self.max_abs,
            "rms": self.rms,
            "tolerance": self.tolerance_used,
            "grid_meta": self.grid_meta,
            "pass": self.passed,
        }


def max_time_step(p: NonstaticityParams, cfg: WaveConfig) -> float:
    """Largest time step resolving the fastest oscillation: 2 pi / (200 omega max(1, c1, c2))."""
    return 2 * math.pi / (200 * cfg.omega * max(1.0, p.c1, p.c2))


def default_time_grid(p: NonstaticityParams, cfg: WaveConfig, n_times: int = 24, periods: float = 1.0) -> np.ndarray:
    """Sample instants over ``periods`` periods (pi/omega) after t0, t0 included."""
    return cfg.t0 + np.linspace(0.0, periods * math.pi / cfg.omega, n_times)


def _relative_residuals(wave: CoherentWave, cfg: WaveConfig, t_grid: np.ndarray, q: np.ndarray, dt: float):
    dq = (q[-1] - q[0]) / (len(q) - 1)
    interior = slice(2, len(q) - 2)
    potential = 0.5 * cfg.epsilon * cfg.omega**2 * q**2
    out = []
    for t in t_grid:
        psi = wave.wavefunction(q, t)
        h_psi = -(cfg.hbar**2) / (2 * cfg.epsilon) * second_derivative(psi, dq) + potential * psi
        dpsi_dt = time_derivative(lambda s: wave.wavefunction(q, s), t, dt)
        residual = 1j * cfg.hbar * dpsi_dt - h_psi
        num = integrate.trapezoid(np.abs(residual[interior]) ** 2, dx=dq)
        den = integrate.trapezoid(np.abs(h_psi[interior]) ** 2, dx=dq)
        out.append(math.sqrt(num / den))
    return np.array(out)


def schrodinger_residual(
    p: NonstaticityParams,
    cfg: WaveConfig,
    t_grid: Optional[np.ndarray] = None,
    q_grid: Optional[np.ndarray] = None,
    dt: Optional[float] = None,
    with_phase: bool = True,
    perturb_fddot: Optional[float] = None,
    tolerance: float = RESIDUAL_TOL,
    check_refinement: bool = False,
) -> ResidualReport:
    """
    Normalized Schrodinger residual of the coherent wave function.

    Parameters
    ----------
    t_grid : array, optional
        Sample instants (>= t0). Defaults to 24 instants over one period.
    q_grid : array, optional
        Uniform q-grid. Defaults to `make_grid`.
    dt : float, optional
        Step of the time stencil. Defaults to `max_time_step`.
    with_phase : bool
        Keep the total-phase factor. Without it the wave function is not a
        solution.
    perturb_fddot : float, optional
        Scale f_ddot by this factor (see `PerturbedTimeFunction`). The
        perturbed time function breaks its nonlinear equation, and the wave
        function stops being a solution.
    check_refinement : bool
        Also evaluate with halved time and q steps. If the residual is above
        ``tolerance`` but falls by at least 4x on refinement the grid is
        under-resolved and `ResolutionError` is raised.
    """
    cfg = resolve_config(p, cfg)
    t_grid = default_time_grid(p, cfg) if t_grid is None else np.asarray(t_grid, dtype=float)
    require_time(cfg, t_grid)
    q = make_grid(p, cfg) if q_grid is None else np.asarray(q_grid, dtype=float)
    dt = max_time_step(p, cfg) if dt is None else float(dt)
    if dt > max_time_step(p, cfg) * (1 + 1e-12):
        logger.warning(f"time step {dt:.3e} is coarser than {max_time_step(p, cfg):.3e}")

    timefunc = PerturbedTimeFunction(p, cfg, perturb_fddot) if perturb_fddot is not None else None
    wave = CoherentWave(p, cfg, timefunc=timefunc, with_phase=with_phase)
    rel = _relative_residuals(wave, cfg, t_grid, q, dt)
    meta = {
        "n_times": len(t_grid),
        "t_min": float(t_grid.min()),
        "t_max": float(t_grid.max()),
        "dt": dt,
        "n_q": len(q),
        "q_min": float(q[0]),
        "q_max": float(q[-1]),
        "with_phase": with_phase,
        "perturb_fddot": perturb_fddot,
    }
    if check_refinement:
        q_fine = np.linspace(q[0], q[-1], 2 * len(q) - 1)
        rel_fine = _relative_residuals(wave, cfg, t_grid, q_fine, dt / 2)
        gain = float(rel.max() / max(rel_fine.max(), np.finfo(float).tiny))
        meta["refinement_gain"] = gain
        logger.info(f"residual {rel.max():.3e} -> {rel_fine.max():.3e} on refinement (gain {gain:.1f})")
        if rel.max() > tolerance and gain >= MIN_REFINEMENT_GAIN:
            raise ResolutionError(
                f"residual {rel.max():.3e} above {tolerance:.1e} but drops {gain:.1f}x on refinement; "
                f"the (t, q) grid is under-resolved"
            )
    report = ResidualReport(
        max_abs=float(rel.max()),
        rms=float(np.sqrt(np.mean(rel**2))),
        tolerance_used=tolerance,
        grid_meta=meta,
    )
    logger.debug(f"schrodinger residual: {report.to_dict()}")
    return report
