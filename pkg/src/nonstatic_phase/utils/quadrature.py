"""
Adaptive quadrature with forced panel splits, built on `scipy.integrate.quad`.
"""
import logging
import warnings
from typing import Callable, Iterable, Tuple

import numpy as np
from scipy import integrate

from nonstatic_phase.exceptions import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_EPSABS = 1e-11
DEFAULT_EPSREL = 1e-13
# QUADPACK flags roundoff when asked for near machine precision; estimates
# within this factor of the request are accepted
ROUNDOFF_SLACK = 100.0


def adaptive_quad(
    func: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    epsabs: float = DEFAULT_EPSABS,
    epsrel: float = DEFAULT_EPSREL,
    limit: int = 1000,
) -> Tuple[float, float]:
    """
    Integrate ``func`` over [a, b] splitting panels at ``breakpoints``.

    Returns
    -------
    (value, abserr)

    Raises
    ------
    QuadratureError
        If the integrator reports non-convergence and its error estimate is
        above the requested tolerance (up to `ROUNDOFF_SLACK`). Results are
        never silently truncated.
    """
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    points = sorted({float(x) for x in breakpoints if a < x < b})
    # QUADPACK takes breakpoints through a separate routine with its own limit
    limit = max(limit, 2 * len(points) + 50)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        # with full_output a fourth element (the message) is only returned on failure
        value, abserr, _info, *failure = integrate.quad(
            func,
            a,
            b,
            points=points or None,
            epsabs=epsabs,
            epsrel=epsrel,
            limit=limit,
            full_output=True,
        )
    tolerance = ROUNDOFF_SLACK * max(epsabs, epsrel * abs(value))
    if failure and abserr > tolerance:
        message = failure[0]
        logger.warning(f"quadrature over [{a}, {b}] did not converge: {message}")
        raise QuadratureError(
            f"quadrature over [{a}, {b}] did not reach {tolerance:.3e} "
            f"(estimate {abserr:.3e}): {message}"
        )
    if failure:
        logger.debug(f"quadrature over [{a}, {b}] accepted with estimate {abserr:.3e}: {failure[0]}")
    if not np.isfinite(value):
        raise QuadratureError(f"quadrature over [{a}, {b}] produced {value}")
    return sign * value, abserr
