"""
Error types raised by the simulator.

The runner maps them to exit statuses: configuration problems exit with 2,
truncation failures with 3 and numerical failures with 4.
"""


class SimulationError(Exception):
    """Base class for all simulator errors"""


class InvalidDimensionError(SimulationError, ValueError):
    """A Hilbert-space dimension is not a positive integer"""


class InvalidShapeError(SimulationError, ValueError):
    """Matrix shape does not match the declared factor dimensions"""


class InvalidOperatorError(SimulationError, ValueError):
    """Operator violates a structural requirement (e.g. Hermiticity)"""


class InvalidStateError(SimulationError, ValueError):
    """Input is not a valid (normalised, positive) quantum state"""


class ModelParameterError(SimulationError, ValueError):
    """Physical parameters are outside their allowed range"""


class TruncationError(SimulationError):
    """Fock-space truncation cannot hold the state within the tail tolerance"""


class NumericalError(SimulationError):
    """Numerical evaluation failed or broke a conserved quantity"""


class HermiteOverflowError(NumericalError, OverflowError):
    """Hermite-polynomial evaluation left the floating-point range"""


class ScenarioConfigError(SimulationError):
    """Scenario file could not be parsed or validated"""


class TruncationWarning(UserWarning):
    """Result was returned but the truncation is at risk of being too small"""
