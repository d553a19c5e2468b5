"""
Exceptions raised by the library. Only the command line front end turns them
into exit codes.
"""


class NonstaticPhaseError(Exception):
    """Base class for all errors raised by `nonstatic_phase`."""


class ParameterError(NonstaticPhaseError, ValueError):
    """A physical parameter violates one of its invariants (e.g. c1*c2 < 1)."""


class ConfigError(NonstaticPhaseError, ValueError):
    """A configuration file or override could not be parsed."""


class QuadratureError(NonstaticPhaseError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ResolutionError(NonstaticPhaseError, RuntimeError):
    """A residual check did not converge under grid refinement."""
