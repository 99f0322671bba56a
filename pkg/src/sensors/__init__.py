from .models import GpsNoiseParams, GpsNoiseState, MagnetometerParams, Measurement
from .noise import (
    GPS_X_STREAM,
    GPS_Y_STREAM,
    MAGNETOMETER_STREAM,
    noise_step,
    sensor_rng,
    simulate_noise_chains,
)
from .gps import GpsSensor, gps_measure
from .magnetometer import Magnetometer, magnetometer_measure

__all__ = [
    "GPS_X_STREAM",
    "GPS_Y_STREAM",
    "MAGNETOMETER_STREAM",
    "GpsNoiseParams",
    "GpsNoiseState",
    "GpsSensor",
    "MagnetometerParams",
    "Magnetometer",
    "Measurement",
    "gps_measure",
    "magnetometer_measure",
    "noise_step",
    "sensor_rng",
    "simulate_noise_chains",
]
