"""Exception hierarchy for the simulator.

Every error raised by the physics modules derives from ``SimulationError``.
Errors caused by bad inputs derive from ``ConfigurationError`` and map to CLI
exit code 2; failures of the numerics themselves derive from
``NumericalError`` and map to exit code 3.
"""


class SimulationError(Exception):
    """Base class for all simulator errors."""

    exit_code = 1


class ConfigurationError(SimulationError):
    """Inputs violate a documented precondition."""

    exit_code = 2


class NumericalError(SimulationError):
    """A numerical procedure failed to produce a trustworthy result."""

    exit_code = 3


# --- Geometry ---


class NonTimelike(ConfigurationError):
    """Four-velocity is null or spacelike."""


class OutOfRange(ConfigurationError):
    """Proper time lies outside the sampled range of a worldline."""


# --- Field correlators ---


class BadRegulator(ConfigurationError):
    """Point-splitting regulator is not positive or too small for the grid."""


class WrongVariant(ConfigurationError):
    """Operation is not defined for the given mirror or field variant."""


class SuperluminalMirror(ConfigurationError):
    """Mirror trajectory reaches or exceeds the speed of light."""


class PointBehindMirror(ConfigurationError):
    """Field point lies on the far side of a mirror."""


class RootBracketFailure(NumericalError):
    """Reflection condition could not be bracketed."""


class DegenerateMap(NumericalError):
    """Ray map is not strictly increasing at the requested point."""


# --- Worldline dynamics ---


class GSingular(ConfigurationError):
    """Third-order equation cannot be solved because e²g(τ) vanishes."""


class NonTimelikeStep(NumericalError):
    """An integration step produced a non-timelike velocity."""


class MissingJerk(ConfigurationError):
    """Mean worldline carries no jerk data."""


class GridMismatch(ConfigurationError):
    """Sequences that must share a proper-time grid do not."""


# --- Noise and ensembles ---


class NotPSD(NumericalError):
    """Covariance could not be factorized even after jitter escalation."""


class TooFewMembers(ConfigurationError):
    """Ensemble is too small for the requested estimator."""


class NonStationary(ConfigurationError):
    """Mean worldline is not stationary."""


# --- Detector ---


class NonStationaryTrajectory(ConfigurationError):
    """Detector trajectory is not stationary with respect to the field state."""


class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature failed to reach the requested accuracy."""


# --- Configuration files ---


class ParseError(ConfigurationError):
    """Configuration text could not be read or contains an unknown key."""

    def __init__(
        self, message: str, *, line: int | None = None, key: str | None = None
    ):
        """Initialize the error.

        Args:
            message: Human-readable reason.
            line: Line number in the configuration file, when known.
            key: Dotted key path that caused the error, when known.
        """
        self.line = line
        self.key = key
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key '{key}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ValidationError(ConfigurationError):
    """A configuration value violates a constraint."""

    def __init__(self, key: str, constraint: str):
        """Initialize the error.

        Args:
            key: Dotted key path of the offending value.
            constraint: Description of the violated constraint.
        """
        self.key = key
        self.constraint = constraint
        super().__init__(f"{key}: {constraint}")


# --- Warnings ---


class RunawayDetected(RuntimeWarning):
    """Solution grows beyond the configured bound; integration continues."""
