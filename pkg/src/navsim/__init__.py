"""Closed-loop GPS/EKF/MPC navigation simulator.

The configuration loader and CLI live in :mod:`navsim.config` and
:mod:`navsim.run_navsim`; they are not imported here so that the model
packages can import :mod:`navsim.navsim_error` without a cycle.
"""

from .navsim_error import (
    ConfigError,
    DegenerateFieldError,
    DynamicsError,
    EstimatorError,
    GeodesyError,
    InfeasibleSpeedError,
    LogFormatError,
    MetricsError,
    NavSimError,
    QpDimensionError,
    SingularInnovationError,
    SteeringSingularityError,
    TrajectoryError,
)

__all__ = [
    "ConfigError",
    "DegenerateFieldError",
    "DynamicsError",
    "EstimatorError",
    "GeodesyError",
    "InfeasibleSpeedError",
    "LogFormatError",
    "MetricsError",
    "NavSimError",
    "QpDimensionError",
    "SingularInnovationError",
    "SteeringSingularityError",
    "TrajectoryError",
]
