"""Virtual GPS: plant truth plus per-axis noise, reported as geodetic fixes."""

from __future__ import annotations

import numpy as np

from geodesy import LtpFrame, from_ltp

from .models import GpsNoiseParams, GpsNoiseState, Measurement
from .noise import GPS_X_STREAM, GPS_Y_STREAM, noise_step, sensor_rng


def _fix(truth: tuple[float, float], p_x: float, p_y: float, frame: LtpFrame, t: float) -> Measurement:
    return Measurement(timestamp=t, kind="gps", payload=from_ltp(frame, truth[0] + p_x, truth[1] + p_y))


def gps_measure(
    truth: tuple[float, float],
    chain_x: GpsNoiseState,
    chain_y: GpsNoiseState,
    frame: LtpFrame,
    params: GpsNoiseParams,
    rngs: tuple[np.random.Generator, np.random.Generator],
    t: float,
) -> tuple[Measurement, GpsNoiseState, GpsNoiseState]:
    """Advance both axis chains once and emit the noisy fix at time ``t``.

    Args:
        truth:  Plant position in the LTP (x east, y north), meters.
        rngs:   Independent streams for the x and y chains.

    Returns:
        The geodetic measurement and the updated x and y chains.
    """
    rng_x, rng_y = rngs
    chain_x, p_x = noise_step(chain_x, params, rng_x)
    chain_y, p_y = noise_step(chain_y, params, rng_y)
    return _fix(truth, p_x, p_y, frame, t), chain_x, chain_y


class GpsSensor:
    """Stateful GPS owned by one simulation loop.

    Under ``per_tick`` updates the chains advance in :meth:`on_tick` and a fix
    reads the current noise; under ``per_measurement`` they advance only
    inside :meth:`measure`.
    """

    def __init__(self, params: GpsNoiseParams, frame: LtpFrame) -> None:
        self.params = params
        self.frame = frame
        self.chain_x = GpsNoiseState(axis="x")
        self.chain_y = GpsNoiseState(axis="y")
        self._rngs = (sensor_rng(params.seed, GPS_X_STREAM), sensor_rng(params.seed, GPS_Y_STREAM))
        self._last_t: float | None = None

    def on_tick(self) -> None:
        if self.params.noise_update != "per_tick":
            return
        self.chain_x, _ = noise_step(self.chain_x, self.params, self._rngs[0])
        self.chain_y, _ = noise_step(self.chain_y, self.params, self._rngs[1])

    def measure(self, truth: tuple[float, float], t: float) -> Measurement:
        if self._last_t is not None and t < self._last_t:
            raise ValueError(f"GPS timestamps must be non-decreasing ({t} < {self._last_t})")
        self._last_t = t
        if self.params.noise_update == "per_tick":
            return _fix(truth, self.chain_x.p, self.chain_y.p, self.frame, t)
        measurement, self.chain_x, self.chain_y = gps_measure(
            truth, self.chain_x, self.chain_y, self.frame, self.params, self._rngs, t
        )
        return measurement
