"""Heading from a body-frame magnetic field vector.

The horizontal field points along ``frame.magnetic_reference`` in the LTP.
Seen from a body rotated by ``theta`` it appears at angle
``magnetic_reference - theta``, which is what both helpers below invert.
"""

from __future__ import annotations

import math

import numpy as np

from navsim.navsim_error import DegenerateFieldError
from utils import wrap_angle

from .models import LtpFrame

HORIZONTAL_EPS = 1e-12


def heading_from_magnetometer(field_vector: np.ndarray, frame: LtpFrame) -> float:
    """Vehicle heading (rad, (-pi, pi]) from a 3-axis body-frame field reading.

    Raises:
        DegenerateFieldError: If the horizontal field magnitude is below 1e-12.
    """
    m = np.asarray(field_vector, dtype=float).reshape(-1)
    if m.shape[0] != 3:
        raise ValueError(f"field vector must have 3 components, got {m.shape[0]}")
    if math.hypot(m[0], m[1]) < HORIZONTAL_EPS:
        raise DegenerateFieldError("horizontal magnetic field vanishes; heading undefined")
    return wrap_angle(frame.magnetic_reference - math.atan2(m[1], m[0]))


def field_from_heading(theta: float, frame: LtpFrame, strength: float = 1.0, vertical: float = 0.0) -> np.ndarray:
    """Noiseless body-frame field a vehicle at heading ``theta`` would read."""
    bearing = frame.magnetic_reference - theta
    return np.array([strength * math.cos(bearing), strength * math.sin(bearing), vertical], dtype=float)
