"""
Panel builders: turn a `FigurePreset` into data frames plus the plot each
frame is drawn as. One builder per preset ``kind``.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from nonstatic_phase.exceptions import ConfigError
from nonstatic_phase.figures.presets import FigurePreset, axis, resolved, sorted_items
from nonstatic_phase.params import NonstaticityParams, WaveConfig, build_inputs, config_from_mapping, nonstaticity_measure
from nonstatic_phase.phases import fock_phases, gamma_d_rate, gamma_g, gamma_total, node_times, resolve_a0
from nonstatic_phase.sweep import run_sweep
from nonstatic_phase.wavefunction import CoherentWave, expectation_H, expectation_I

logger = logging.getLogger(__name__)

PHASE_FIELDS = {"gamma_G": "gamma_g", "gamma_D": "gamma_d", "gamma_total": "gamma_total"}
FOCK_STYLE = {"linestyle": "-."}
COHERENT_STYLE = {"marker": "o", "markersize": 2, "linestyle": "none"}


@dataclass
class Panel:
    """Data of one panel and how to draw it (``plot`` is "lines" or "density")."""

    name: str
    frame: pd.DataFrame
    plot: str
    x: str
    ys: List[str] = field(default_factory=list)
    y: Optional[str] = None
    z: Optional[str] = None
    mask: Optional[str] = None
    title: str = ""
    styles: Dict[str, dict] = field(default_factory=dict)
    vlines: Tuple[float, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)


def wave_inputs(values: Dict[str, Any]) -> Tuple[NonstaticityParams, WaveConfig]:
    """Validated inputs from preset values (same path as a config file)."""
    return build_inputs(config_from_mapping(values))


def _time_axis(preset: FigurePreset, key: str = "time") -> np.ndarray:
    return axis(preset.settings[key])


def _phase_sample(p, cfg, t, kind: str, level: Optional[int] = None):
    if level is None:
        return getattr(gamma_total(p, cfg, t), PHASE_FIELDS[kind])
    return getattr(fock_phases(p, cfg, level, t), PHASE_FIELDS[kind])


def build_expectations(preset: FigurePreset) -> List[Panel]:
    settings = preset.settings
    c = axis(settings.axis)
    wave = resolved(settings.wave)
    panels = []
    for angle_name, angles in sorted_items(settings.angles):
        for line_name, line in sorted_items(settings.lines):
            rows = []
            for value in c:
                values = {**wave, **resolved(angles)}
                if line.vary == "both":
                    values.update(c1=value, c2=value)
                else:
                    values.update(resolved(line.get("fixed", {})))
                    values[line.vary] = value
                p, cfg = wave_inputs(values)
                rows.append(
                    {"c": value, "A0": resolve_a0(p, cfg), "I": expectation_I(cfg, p), "H": expectation_H(p, cfg)}
                )
            panels.append(
                Panel(
                    name=f"{angle_name}_{line_name}",
                    frame=pd.DataFrame(rows),
                    plot="lines",
                    x="c",
                    ys=["I", "H"],
                    title=f"{line_name}, angles {angle_name}",
                    metadata={"angles": resolved(angles), "line": line.to_dict()},
                )
            )
    return panels


def build_rate_density(preset: FigurePreset) -> List[Panel]:
    settings = preset.settings
    phis, thetas = axis(settings.phi), axis(settings.theta)
    wave = resolved(settings.wave)
    panels = []
    for name, spec in sorted_items(settings.panels):
        rows = []
        for phi in phis:
            for theta in thetas:
                p, cfg = wave_inputs({**wave, **resolved(spec), "phi": phi, "theta": theta})
                rows.append({"phi": phi, "theta": theta, "Gamma_D": gamma_d_rate(p, cfg)})
        panels.append(
            Panel(
                name=name,
                frame=pd.DataFrame(rows),
                plot="density",
                x="phi",
                y="theta",
                z="Gamma_D",
                title=f"Gamma_D(t0), (c1, c2) = ({spec.c1}, {spec.c2}), theta0 = {spec.theta0}",
                metadata=resolved(spec),
            )
        )
    return panels


def build_phase_evolution(preset: FigurePreset) -> List[Panel]:
    settings = preset.settings
    t = _time_axis(preset)
    wave = resolved(settings.wave)
    curves = [(f"{settings.vary}={value}", {**wave, settings.vary: value}) for value in settings.series]
    if "extra" in settings:
        curves.append((settings.extra.label, {**wave, **resolved(settings.extra.wave)}))
    samples = {}
    meta = {}
    for label, values in curves:
        p, cfg = wave_inputs(values)
        samples[label] = gamma_total(p, cfg, cfg.t0 + t)
        meta[label] = {"D": float(nonstaticity_measure(p))}
    panels = []
    for kind in settings.phases:
        frame = pd.DataFrame({"t": t})
        for label, sample in samples.items():
            frame[label] = getattr(sample, PHASE_FIELDS[kind])
        panels.append(
            Panel(name=kind, frame=frame, plot="lines", x="t", ys=list(samples), title=kind, metadata={"curves": meta})
        )
    if "density" in settings:
        panels.append(_density_panel(preset, wave))
    return panels


def _density_panel(preset: FigurePreset, wave: Dict[str, Any]) -> Panel:
    density = preset.settings.density
    p, cfg = wave_inputs({**wave, **resolved(density.wave)})
    q, times = axis(density.q), axis(density.time)
    coherent = CoherentWave(p, cfg, with_phase=False)
    frames = [
        pd.DataFrame({"t": cfg.t0 + s, "q": q, "abs2": np.abs(coherent.eigenfunction(q, cfg.t0 + s)) ** 2}) for s in times
    ]
    nodes = node_times(p, cfg, cfg.t0, cfg.t0 + times[-1])
    return Panel(
        name="density",
        frame=pd.concat(frames, ignore_index=True),
        plot="density",
        x="t",
        y="q",
        z="abs2",
        title="probability density",
        metadata={"nodes": nodes.tolist()},
    )


def build_fock_comparison(preset: FigurePreset) -> List[Panel]:
    settings = preset.settings
    t = _time_axis(preset)
    wave = resolved(settings.wave)
    levels = [int(n) for n in settings.levels]
    panels = []
    for name, spec in sorted_items(settings.panels):
        base = {**wave, **resolved(spec)}
        p, _ = wave_inputs(base)
        coherent = {n: wave_inputs({**base, "A0": math.sqrt(n)}) for n in levels}
        t_abs = coherent[levels[0]][1].t0 + t
        nodes = tuple(node_times(p, coherent[levels[0]][1], t_abs[0], t_abs[-1]).tolist())
        for kind in settings.phases:
            frame = pd.DataFrame({"t": t_abs})
            styles = {}
            for n in levels:
                label = f"A0^2={n}"
                frame[label] = _phase_sample(*coherent[n], t_abs, kind)
                styles[label] = COHERENT_STYLE
            for n in levels:
                label = f"n={n}"
                frame[label] = _phase_sample(*coherent[n], t_abs, kind, level=n)
                styles[label] = FOCK_STYLE
            panels.append(
                Panel(
                    name=name if len(settings.phases) == 1 else f"{name}_{kind}",
                    frame=frame,
                    plot="lines",
                    x="t",
                    ys=[c for c in frame.columns if c != "t"],
                    title=f"{kind}, (c1, c2) = ({spec.c1}, {spec.c2})",
                    styles=styles,
                    vlines=nodes,
                    metadata={"D": float(nonstaticity_measure(p)), "nodes": list(nodes), **resolved(spec)},
                )
            )
    return panels


def build_scan(preset: FigurePreset, n_jobs: int = 1) -> List[Panel]:
    settings = preset.settings
    wave = resolved(settings.wave)
    c1, c2 = axis(settings.c1), axis(settings.c2)
    curves = dict(sorted_items(settings.curves))
    amplitudes = sorted({math.sqrt(spec.coherent) for spec in curves.values() if "coherent" in spec})
    levels = sorted({int(spec.fock) for spec in curves.values() if "fock" in spec})
    df = run_sweep(
        wave,
        {"c1": list(c1), "c2": list(c2), "A0": amplitudes or [0.0]},
        t_span=float(settings.t),
        fock_levels=levels,
        n_jobs=n_jobs,
    )
    line = len(c2) == 1
    panels = []
    for name, spec in curves.items():
        if "coherent" in spec:
            rows = df[np.isclose(df["A0"], math.sqrt(spec.coherent))]
            column, label = "gamma_G", f"gamma_G, A0^2={spec.coherent}"
        else:
            rows = df[np.isclose(df["A0"], df["A0"].iloc[0])]
            column, label = f"gamma_G_n{spec.fock}", f"gamma_G,n, n={spec.fock}"
        frame = rows[["c1", "c2", "valid", column]].rename(columns={column: "value"}).reset_index(drop=True)
        if line:
            panels.append(Panel(name=name, frame=frame, plot="lines", x="c1", ys=["value"], title=label, metadata=spec.to_dict()))
        else:
            panels.append(
                Panel(
                    name=name,
                    frame=frame,
                    plot="density",
                    x="c1",
                    y="c2",
                    z="value",
                    mask="valid",
                    title=label,
                    metadata=spec.to_dict(),
                )
            )
    return panels


def build_level_scan(preset: FigurePreset) -> List[Panel]:
    settings = preset.settings
    wave = resolved(settings.wave)
    levels = [int(n) for n in axis(settings.levels)]
    panels = []
    for name, spec in sorted_items(settings.panels):
        rows = []
        for n in levels:
            p, cfg = wave_inputs({**wave, **resolved(spec), "A0": math.sqrt(n)})
            t = cfg.t0 + float(settings.t)
            rows.append({"level": n, "gamma_G": float(gamma_g(p, cfg, t)), "gamma_G_n": float(fock_phases(p, cfg, n, t).gamma_g)})
        panels.append(
            Panel(
                name=name,
                frame=pd.DataFrame(rows),
                plot="lines",
                x="level",
                ys=["gamma_G", "gamma_G_n"],
                title=f"(c1, c2) = ({spec.c1}, {spec.c2}), (phi, theta) = ({spec.phi}, {spec.theta})",
                styles={"gamma_G": COHERENT_STYLE, "gamma_G_n": FOCK_STYLE},
                metadata=resolved(spec),
            )
        )
    return panels


BUILDERS: Dict[str, Callable[..., List[Panel]]] = {
    "expectations": build_expectations,
    "rate_density": build_rate_density,
    "phase_evolution": build_phase_evolution,
    "fock_comparison": build_fock_comparison,
    "scan": build_scan,
    "level_scan": build_level_scan,
}


def build_panels(preset: FigurePreset, n_jobs: int = 1) -> List[Panel]:
    if preset.kind not in BUILDERS:
        raise ConfigError(f"preset {preset.identifier} has unknown kind {preset.kind!r}; known: {sorted(BUILDERS)}")
    builder = BUILDERS[preset.kind]
    panels = builder(preset, n_jobs=n_jobs) if preset.kind == "scan" else builder(preset)
    logger.info(f"{preset.identifier}: built {len(panels)} panel(s)")
    return panels
