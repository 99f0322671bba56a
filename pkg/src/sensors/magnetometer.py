"""Virtual magnetometer, modelled as a direct noisy heading observation."""

from __future__ import annotations

import numpy as np

from utils import wrap_angle

from .models import MagnetometerParams, Measurement
from .noise import MAGNETOMETER_STREAM, sensor_rng


def magnetometer_measure(theta_true: float, params: MagnetometerParams, rng: np.random.Generator, t: float) -> Measurement:
    """Heading reading ``wrap(theta_true + N(0, sigma_theta))`` at time ``t``."""
    theta = wrap_angle(theta_true + float(rng.normal(loc=0.0, scale=params.sigma_theta)))
    return Measurement(timestamp=t, kind="magnetometer", payload=theta)


class Magnetometer:
    def __init__(self, params: MagnetometerParams) -> None:
        self.params = params
        self._rng = sensor_rng(params.seed, MAGNETOMETER_STREAM)

    def measure(self, theta_true: float, t: float) -> Measurement:
        return magnetometer_measure(theta_true, self.params, self._rng, t)
