from .logger import LoggingConfig, configure_logging, get_logger, bind_logger
from .angles import wrap_angle
from .files import atomic_output

__all__ = [
    "LoggingConfig",
    "configure_logging",
    "get_logger",
    "bind_logger",
    "wrap_angle",
    "atomic_output",
]
