"""
Fourth-order central finite differences used by the grid checks.
"""
from typing import Callable

import numpy as np


def time_derivative(func: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    """5-point central derivative of ``func`` at ``t``; evaluates t - 2h .. t + 2h."""
    return (-func(t + 2 * h) + 8 * func(t + h) - 8 * func(t - h) + func(t - 2 * h)) / (12 * h)


def first_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """
    5-point first derivative along the last axis of uniformly spaced samples.
    Samples outside the grid are taken as zero.
    """
    v = np.pad(values, [(0, 0)] * (values.ndim - 1) + [(2, 2)])
    return (-v[..., 4:] + 8 * v[..., 3:-1] - 8 * v[..., 1:-3] + v[..., :-4]) / (12 * h)


def second_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """5-point second derivative along the last axis (zero outside the grid)."""
    v = np.pad(values, [(0, 0)] * (values.ndim - 1) + [(2, 2)])
    return (-v[..., 4:] + 16 * v[..., 3:-1] - 30 * v[..., 2:-2] + 16 * v[..., 1:-3] - v[..., :-4]) / (
        12 * h * h
    )
