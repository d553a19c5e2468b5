from .panels import BUILDERS, Panel, build_panels
from .presets import FigurePreset, load_presets, resolve_preset
