"""
Parameter sweeps over {c1, c2, phi, theta, A0, omega}.

Grid points violating c1 c2 >= 1 are kept as rows flagged ``valid = False``
with empty outputs. Rows come out in lexicographic grid order whatever the
number of workers.
"""
import itertools
import logging
import math
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm.auto import tqdm

from nonstatic_phase.exceptions import ConfigError, ParameterError
from nonstatic_phase.params import build_inputs, config_from_mapping, nonstaticity_measure
from nonstatic_phase.phases import fock_phases, gamma_d_rate, gamma_g
from nonstatic_phase.utils import conf
from nonstatic_phase.utils.utils import tqdm_joblib

logger = logging.getLogger(__name__)

SWEEP_AXES = ("c1", "c2", "phi", "theta", "A0", "omega")
# carries the ParameterError text of an invalid row until run_sweep reports it
REASON_KEY = "_reason"


def parse_axis(text: str) -> List[float]:
    """
    Parse an axis given as ``start:stop:num`` (inclusive linspace) or as a
    comma-separated list of values. Values may be expressions (``pi/8``).
    """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            num = int(conf.parse_value(num))
            if num < 1:
                raise ConfigError(f"axis {text!r} has no points")
            points = np.linspace(float(conf.parse_value(start)), float(conf.parse_value(stop)), num)
            return [float(x) for x in np.round(points, 12)]
        values = [float(conf.parse_value(v)) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid axis {text!r}: {e}") from e
    if not values:
        raise ConfigError(f"axis {text!r} has no points")
    return values


def grid_points(axes: Mapping[str, Sequence[float]]) -> List[Dict[str, float]]:
    """Cartesian product of the axes in the fixed order of `SWEEP_AXES`."""
    unknown = sorted(set(axes) - set(SWEEP_AXES))
    if unknown:
        raise ConfigError(f"cannot sweep over {unknown}; sweepable: {', '.join(SWEEP_AXES)}")
    names = [name for name in SWEEP_AXES if name in axes]
    for name in names:
        if len(axes[name]) == 0:
            raise ConfigError(f"empty grid along {name}")
    return [dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names))]


def evaluate_point(
    base: Mapping[str, Any],
    point: Mapping[str, float],
    t_span: float = 1.0,
    fock_levels: Sequence[int] = (),
) -> Dict[str, Any]:
    """
    One sweep row: the grid point, validity, D, Gamma_D, gamma_G after
    ``t_span`` and the Fock geometric phases for ``fock_levels``.
    """
    row: Dict[str, Any] = dict(point)
    values = dict(base)
    values.update(point)
    if "A0" in point:
        values.pop("Q0", None)
    outputs = ["D", "Gamma_D", "gamma_G"] + [f"gamma_G_n{n}" for n in fock_levels]
    try:
        p, cfg = build_inputs(config_from_mapping(values))
    except ParameterError as e:
        logger.debug(f"invalid sweep point {dict(point)}: {e}")
        row.update({"valid": False, **{name: math.nan for name in outputs}, REASON_KEY: str(e)})
        return row
    t = cfg.t0 + t_span
    row["valid"] = True
    row["D"] = float(nonstaticity_measure(p))
    row["Gamma_D"] = gamma_d_rate(p, cfg)
    row["gamma_G"] = float(gamma_g(p, cfg, t))
    for n in fock_levels:
        row[f"gamma_G_n{n}"] = float(fock_phases(p, cfg, n, t).gamma_g)
    return row


def run_sweep(
    base: Mapping[str, Any],
    axes: Mapping[str, Sequence[float]],
    t_span: float = 1.0,
    fock_levels: Sequence[int] = (),
    n_jobs: int = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Evaluate every grid point (concurrently with ``n_jobs`` workers) and
    return the rows in lexicographic grid order.

    Parameters
    ----------
    base : mapping
        Config values shared by all points (as accepted by `config_from_mapping`).
    axes : mapping
        Axis name -> sample values. No axes means a single point at ``base``.
    """
    points = grid_points(axes) if axes else [{}]
    tasks = [delayed(evaluate_point)(base, point, t_span, tuple(fock_levels)) for point in points]
    with tqdm_joblib(tqdm(total=len(tasks), desc="sweep", disable=not progress)):
        rows = Parallel(n_jobs=n_jobs)(tasks)
    df = pd.DataFrame(rows)
    reasons = df.pop(REASON_KEY).dropna() if REASON_KEY in df else pd.Series(dtype=object)
    n_invalid = int((~df["valid"]).sum())
    if n_invalid:
        logger.warning(
            f"{n_invalid} of {len(df)} grid points are invalid and flagged valid=False"
            f" (first: {reasons.iloc[0]})"
        )
    names = [name for name in SWEEP_AXES if name in (axes or {})]
    columns = names + ["valid"] + [c for c in df.columns if c not in names and c != "valid"]
    return df[columns]

