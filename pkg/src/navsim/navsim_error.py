

class NavSimError(Exception):
    """Base exception for navigation simulator errors."""
    pass


class ConfigError(NavSimError, ValueError):
    """Raised when a scenario configuration is unreadable or fails validation."""


class DynamicsError(NavSimError, ValueError):
    """Raised when the vehicle model is evaluated outside its domain."""


class SteeringSingularityError(DynamicsError):
    """Steering angle at or beyond the tan(delta) singularity at +/- pi/2."""


class InfeasibleSpeedError(DynamicsError):
    """Requested speed needs more than full throttle to hold."""


class GeodesyError(NavSimError, ValueError):
    """Invalid geodetic coordinate or frame."""


class DegenerateFieldError(GeodesyError):
    """Magnetometer field has no usable horizontal component."""


class EstimatorError(NavSimError):
    """Raised by the state estimator."""


class SingularInnovationError(EstimatorError):
    """Innovation covariance could not be inverted."""


class TrajectoryError(NavSimError, ValueError):
    """Raised for empty or malformed reference trajectories."""


class QpDimensionError(NavSimError, ValueError):
    """Raised when QP blocks have inconsistent shapes."""


class MetricsError(NavSimError, ValueError):
    """Raised when metrics are requested for an empty log."""


class LogFormatError(NavSimError, ValueError):
    """Raised when a run log CSV does not match the documented schema."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
