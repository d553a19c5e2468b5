"""
Shared fixtures: parameter sets used across the test modules.
"""
import math
import sys
from pathlib import Path

import pytest
from absl import logging as absl_logging
from click.testing import CliRunner

from nonstatic_phase.params import NonstaticityParams, WaveConfig, make_params

PROJECT_ROOT = Path(__file__).resolve().parents[2]

# ml_collections imports absl, whose handler binds sys.stderr at import time
# (pytest's capture buffer here). The CLI's dictConfig closes all existing
# handlers, and absl closes that buffer when run inside CliRunner. Bind it to
# the real stderr, which absl never closes.
absl_logging.get_absl_handler().python_handler.stream = sys.__stderr__


@pytest.fixture
def static():
    return NonstaticityParams.static()


@pytest.fixture
def moderate():
    """c1 = 2.5, c2 = 0.5, c3 = 0.5, phi = 0 (D = 0.79)."""
    return make_params(2.5, 0.5)


@pytest.fixture
def extreme():
    """c1 = c2 = 20, c3 = sqrt(399), phi = 0 (D = 14.12)."""
    return make_params(20.0, 20.0)


@pytest.fixture
def extreme_rotated():
    return NonstaticityParams(20.0, 20.0, math.sqrt(399.0), math.pi / 8)


@pytest.fixture
def small_wave():
    """A0 = 0.1 in natural units."""
    return WaveConfig(a0=0.1)


@pytest.fixture
def vacuum():
    return WaveConfig(a0=0.0)


@pytest.fixture
def conf_dir():
    return PROJECT_ROOT / "conf"


@pytest.fixture
def runner():
    return CliRunner()
