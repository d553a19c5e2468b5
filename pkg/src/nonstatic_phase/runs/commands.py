"""
The runs behind the ``phases``, ``figure``, ``sweep`` and ``verify`` commands.
"""
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from nonstatic_phase.exceptions import ConfigError, ParameterError
from nonstatic_phase.figures.panels import build_panels
from nonstatic_phase.figures.presets import load_presets, resolve_preset
from nonstatic_phase.params import NonstaticityParams, WaveConfig, build_inputs, nonstaticity_measure
from nonstatic_phase.phases import gamma_total, phase_time_T
from nonstatic_phase.runs.base import Run
from nonstatic_phase.sweep import run_sweep
from nonstatic_phase.timefunc import eval_f
from nonstatic_phase.verify.audit import CheckRecord, random_inputs, run_suite
from nonstatic_phase.visualization.plots import draw_panel, save_svg

PHASES_COLUMNS = ["t", "gamma_G", "gamma_D", "gamma_total", "gamma_NL", "gamma_L", "T", "f", "D"]


def phase_frame(p: NonstaticityParams, cfg: WaveConfig, t: np.ndarray) -> pd.DataFrame:
    """Phases, phase time, f and D on the time grid ``t``."""
    sample = gamma_total(p, cfg, t)
    return pd.DataFrame(
        {
            "t": t,
            "gamma_G": sample.gamma_g,
            "gamma_D": sample.gamma_d,
            "gamma_total": sample.gamma_total,
            "gamma_NL": sample.gamma_nl,
            "gamma_L": sample.gamma_l,
            "T": phase_time_T(p, cfg, t),
            "f": eval_f(p, cfg, t).f,
            "D": float(nonstaticity_measure(p)),
        },
        columns=PHASES_COLUMNS,
    )


class PhasesRun(Run):
    """
    Phase trajectory of one configuration on ``n_steps`` equally spaced times
    of [t_start, t_end] (t_start defaults to t0). Writes ``phases.csv``.
    """

    def __init__(self, t_start: Optional[float] = None, t_end: float = 10.0, n_steps: int = 101, **kwargs):
        super().__init__(**kwargs)
        self.t_start = t_start
        self.t_end = t_end
        self.n_steps = n_steps

    def options(self) -> Dict[str, Any]:
        return {"phases": {"t_start": self.t_start, "t_end": self.t_end, "n_steps": self.n_steps}}

    def time_grid(self, cfg: WaveConfig) -> np.ndarray:
        opts = self.config.phases
        t_start = cfg.t0 if opts.t_start is None else float(opts.t_start)
        t_end, n_steps = float(opts.t_end), int(opts.n_steps)
        if n_steps < 2:
            raise ParameterError(f"n_steps must be >= 2, got {n_steps}")
        if t_start < cfg.t0:
            raise ParameterError(f"t_start must be >= t0={cfg.t0}, got {t_start}")
        if t_end < t_start:
            raise ParameterError(f"t_end={t_end} is before t_start={t_start}")
        return np.linspace(t_start, t_end, n_steps)

    def run(self) -> pd.DataFrame:
        p, cfg = build_inputs(self.config.wave)
        df = phase_frame(p, cfg, self.time_grid(cfg))
        self.write_frame(df, "phases.csv")
        return df


class FigureRun(Run):
    """
    Reproduces a figure preset: one CSV and one SVG per panel plus
    ``<preset>_metadata.json`` carrying the caption constants. Presets are
    read-only and fix their own waves, so a wave config file is rejected.
    """

    def __init__(self, preset: str, presets_path: Optional[str] = None, n_jobs: int = 1, seed: int = 0, **kwargs):
        super().__init__(**kwargs)
        self.preset = preset
        self.presets_path = presets_path
        self.n_jobs = n_jobs
        self.seed = seed

    def wave_values(self) -> Dict[str, Any]:
        if self.config_path is not None:
            raise ConfigError(
                f"figure presets fix their own waves; --config {self.config_path} is not accepted"
            )
        return {}

    def options(self) -> Dict[str, Any]:
        return {
            "figure": {
                "preset": self.preset,
                "presets": None if self.presets_path is None else str(self.presets_path),
                "jobs": self.n_jobs,
                "seed": self.seed,
            }
        }

    def run(self) -> List[str]:
        opts = self.config.figure
        preset = resolve_preset(opts.preset, load_presets(overrides=opts.presets))
        panels = build_panels(preset, n_jobs=int(opts.jobs))
        summary = {}
        for panel in panels:
            stem = f"{preset.identifier}_{panel.name}"
            self.write_frame(panel.frame, f"{stem}.csv")
            fig, _ = draw_panel(panel)
            save_svg(fig, self.output_path(f"{stem}.svg"))
            summary[panel.name] = {
                "title": panel.title,
                "plot": panel.plot,
                "columns": list(panel.frame.columns),
                "metadata": panel.metadata,
            }
        self.write_json({**preset.metadata(), "panels": summary}, f"{preset.identifier}_metadata.json")
        return list(self.outputs)


class SweepRun(Run):
    """
    Grid sweep over the configuration (see `nonstatic_phase.sweep`). Writes
    ``sweep.csv`` with one row per grid point in lexicographic order.
    """

    def __init__(
        self,
        axes: Optional[Dict[str, List[float]]] = None,
        t_span: float = 1.0,
        fock_levels: Sequence[int] = (),
        n_jobs: int = 1,
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.axes = dict(axes or {})
        self.t_span = t_span
        self.fock_levels = list(fock_levels)
        self.n_jobs = n_jobs

    def options(self) -> Dict[str, Any]:
        return {
            "sweep": {
                "axes": {name: list(values) for name, values in self.axes.items()},
                "t_span": self.t_span,
                "fock_levels": self.fock_levels,
                "jobs": self.n_jobs,
            }
        }

    def run(self) -> pd.DataFrame:
        opts = self.config.sweep
        base = {k: v for k, v in self.config.wave.to_dict().items() if v is not None}
        axes = {name: list(values) for name, values in opts.axes.to_dict().items()}
        df = run_sweep(
            base,
            axes,
            t_span=float(opts.t_span),
            fock_levels=[int(n) for n in opts.fock_levels],
            n_jobs=int(opts.jobs),
            progress=self.verbose,
        )
        self.write_frame(df, "sweep.csv")
        return df


class VerifyRun(Run):
    """
    Runs the verification suite on the configured wave, or on a random one
    drawn from ``seed`` when ``source`` is "random". Writes
    ``verify_report.json``; the report is written whether the checks pass
    or not.
    """

    def __init__(
        self,
        source: str = "config",
        seed: int = 0,
        perturb_fddot: Optional[float] = None,
        checks: Optional[Sequence[str]] = None,
        n_jobs: int = 1,
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.source = source
        self.seed = seed
        self.perturb_fddot = perturb_fddot
        self.checks = None if checks is None else list(checks)
        self.n_jobs = n_jobs

    def options(self) -> Dict[str, Any]:
        return {
            "verify": {
                "source": self.source,
                "seed": self.seed,
                "perturb_fddot": self.perturb_fddot,
                "checks": self.checks,
                "jobs": self.n_jobs,
            }
        }

    def run(self) -> List[CheckRecord]:
        opts = self.config.verify
        seed = int(opts.seed)
        if opts.source == "random":
            p, cfg = random_inputs(seed)
        else:
            p, cfg = build_inputs(self.config.wave)
        perturb = opts.perturb_fddot
        if perturb is None:
            perturb = self.config.wave.get("perturb_fddot")
        records = run_suite(
            p,
            cfg,
            seed=seed,
            n_jobs=int(opts.jobs),
            checks=None if opts.checks is None else list(opts.checks),
            perturb_fddot=None if perturb is None else float(perturb),
            progress=self.verbose,
        )
        report = {
            "source": opts.source,
            "seed": seed,
            "perturb_fddot": perturb,
            "passed": all(record.passed for record in records),
            "records": [record.to_dict() for record in records],
        }
        self.write_json(report, "verify_report.json")
        failed = [record.name for record in records if not record.passed]
        if failed:
            self.logger.warning(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return records
