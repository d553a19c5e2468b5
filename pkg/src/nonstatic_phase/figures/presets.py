"""
Figure presets: read-only parameter sets loaded from ``presets.yml`` and
looked up by identifier or any of its aliases (``fig8``, ``Fig8``,
``figure-8``, ...).
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
from ml_collections import config_dict

from nonstatic_phase.exceptions import ConfigError
from nonstatic_phase.utils import conf

logger = logging.getLogger(__name__)

PRESETS_FILE = Path(__file__).with_name("presets.yml")

figure_pattern = re.compile(r"^(fig|figure)[_\- ]?(\d+)$", re.IGNORECASE)


@dataclass(frozen=True)
class FigurePreset:
    """
    A figure preset. ``settings`` is a frozen `ConfigDict` holding the panel
    definitions; ``caption_constants`` are emitted verbatim in the run
    metadata together with the identifier.
    """

    identifier: str
    title: str
    caption: str
    kind: str
    caption_constants: Dict[str, Any]
    settings: config_dict.FrozenConfigDict

    def metadata(self) -> Dict[str, Any]:
        return {
            "preset": self.identifier,
            "title": self.title,
            "caption": self.caption,
            "caption_constants": dict(self.caption_constants),
        }


def make_aliases(identifier: str) -> set:
    """
    Make name aliases for a preset identifier
    """
    aliases = {identifier, identifier.lower(), identifier.upper()}
    match = figure_pattern.match(identifier)
    if match:
        n = match.group(2)
        for prefix in ("fig", "Fig", "figure", "Figure"):
            aliases.update({f"{prefix}{n}", f"{prefix}_{n}", f"{prefix}-{n}", f"{prefix} {n}"})
    return aliases


def _as_preset(identifier: str, entry: Dict[str, Any]) -> FigurePreset:
    entry = dict(entry)
    try:
        title = entry.pop("title")
        caption = entry.pop("caption", "")
        kind = entry.pop("kind")
    except KeyError as e:
        raise ConfigError(f"preset {identifier!r} is missing {e}") from e
    constants = entry.pop("caption_constants", {})
    return FigurePreset(
        identifier=identifier,
        title=title,
        caption=caption,
        kind=kind,
        caption_constants=constants,
        settings=config_dict.FrozenConfigDict(entry),
    )


def load_presets(path: Union[str, Path, None] = None, overrides: Union[str, Path, None] = None) -> Dict[str, FigurePreset]:
    """
    Load the packaged presets (or ``path``), then replace entries by
    identifier with those of the ``overrides`` YAML file.
    """
    path = PRESETS_FILE if path is None else Path(path)
    entries = conf.read_yaml(path)
    if overrides is not None:
        try:
            user = conf.read_yaml(overrides)
        except OSError as e:
            raise ConfigError(f"cannot read presets file {overrides}: {e}") from e
        for identifier in sorted(user):
            logger.info(f"preset {identifier} overridden from {overrides}")
        entries.update(user)
    return {identifier: _as_preset(identifier, entry) for identifier, entry in entries.items()}


def get_preset_registry(presets: Dict[str, FigurePreset]) -> Dict[str, FigurePreset]:
    """
    Map every alias of every preset to the preset
    """
    registry = {}
    for identifier, preset in presets.items():
        registry.update({alias: preset for alias in make_aliases(identifier)})
    return registry


def resolve_preset(name: str, presets: Optional[Dict[str, FigurePreset]] = None) -> FigurePreset:
    presets = load_presets() if presets is None else presets
    registry = get_preset_registry(presets)
    if name not in registry:
        valid = ", ".join(sorted(presets, key=_sort_key))
        raise ConfigError(f"unknown preset {name!r}; valid presets: {valid}")
    return registry[name]


def _sort_key(identifier: str):
    match = figure_pattern.match(identifier)
    return (0, int(match.group(2)), "") if match else (1, 0, identifier)


# --- value helpers used by the panel builders -------------------------------------------


def value(x: Any) -> Any:
    """Numbers pass through; strings are parsed as expressions (``pi/8``)."""
    if isinstance(x, str):
        try:
            return conf.parse_value(x)
        except ValueError as e:
            raise ConfigError(f"invalid preset value {x!r}: {e}") from e
    return x


def axis(spec) -> np.ndarray:
    """
    Sample points of an axis given as ``{start, stop, num}`` or ``{points}``.
    Points are rounded to 12 decimals so that grid steps like 0.1 land on
    their decimal values.
    """
    if "points" in spec:
        return np.asarray([value(v) for v in spec["points"]], dtype=float)
    points = np.linspace(value(spec["start"]), value(spec["stop"]), int(spec["num"]))
    return np.round(points, 12)


def resolved(mapping: Optional[Any]) -> Dict[str, Any]:
    return {k: value(v) for k, v in dict(mapping or {}).items()}


def sorted_items(mapping: Any) -> Iterable:
    return sorted(dict(mapping).items())
