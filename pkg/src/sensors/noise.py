"""Random-walk GPS noise.

The chain draws its second difference from a normal distribution whose mean
``-p / p_max`` pulls the noise back towards zero:

    m = -p_t / p_max
    a ~ N(m, sigma)
    v_{t+1} = v_t + a
    p_{t+1} = p_t + v_t + a

The position update adds the already-updated velocity, in that order.
"""

from __future__ import annotations

import numpy as np

from .models import GpsNoiseParams, GpsNoiseState

GPS_X_STREAM = 0
GPS_Y_STREAM = 1
MAGNETOMETER_STREAM = 2


def sensor_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for ``stream`` derived from ``seed``."""
    return np.random.default_rng([int(seed), int(stream)])


def noise_step(
    state: GpsNoiseState,
    params: GpsNoiseParams,
    rng: np.random.Generator,
) -> tuple[GpsNoiseState, float]:
    """Advance one chain by one step and return ``(new_state, p_{t+1})``."""
    if params.model == "gaussian":
        p = float(rng.normal(loc=0.0, scale=params.sigma))
        return GpsNoiseState(p=p, v=0.0, axis=state.axis), p

    mean = -state.p / params.p_max
    a = float(rng.normal(loc=mean, scale=params.sigma))
    v_next = state.v + a
    p_next = state.p + state.v + a
    return GpsNoiseState(p=p_next, v=v_next, axis=state.axis), p_next


def simulate_noise_chains(
    n_chains: int,
    n_steps: int,
    params: GpsNoiseParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Run ``n_chains`` independent chains from rest for ``n_steps``.

    Returns:
        Array of shape ``(n_steps, n_chains)`` holding ``p`` after every step.
    """
    if n_chains < 1 or n_steps < 1:
        raise ValueError("n_chains and n_steps must be >= 1")
    history = np.empty((n_steps, n_chains), dtype=float)
    if params.model == "gaussian":
        history[:] = rng.normal(loc=0.0, scale=params.sigma, size=(n_steps, n_chains))
        return history

    p = np.zeros(n_chains)
    v = np.zeros(n_chains)
    for k in range(n_steps):
        a = rng.normal(loc=-p / params.p_max, scale=params.sigma)
        p = p + v + a
        v = v + a
        history[k] = p
    return history
