"""Value types of the 4-DOF bicycle model.

All three types are frozen dataclasses validated on construction, so any
``VehicleState`` / ``ControlInput`` / ``VehicleParams`` that exists satisfies
its invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping

import numpy as np

from navsim.navsim_error import DynamicsError
from utils import wrap_angle


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the vehicle and its DC drive.

    Attributes:
        r_wheel:    Wheel radius (m).
        i_wheel:    Wheel inertia (kg m^2).
        l:          Wheelbase (m).
        gamma:      Gear ratio (dimensionless).
        tau_0:      Motor stall torque (N m).
        omega_0:    Motor no-load angular velocity (rad/s).
        c_0:        Constant resistance torque (N m).
        c_1:        Speed-proportional resistance coefficient (N m s).
        delta_max:  Steering limit (rad).
    """

    r_wheel: float
    i_wheel: float
    l: float
    gamma: float
    tau_0: float
    omega_0: float
    c_0: float
    c_1: float
    delta_max: float

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if not math.isfinite(value):
                raise DynamicsError(f"VehicleParams.{item.name} must be finite, got {value!r}")
        for name in ("r_wheel", "i_wheel", "l", "gamma", "tau_0", "omega_0"):
            if getattr(self, name) <= 0.0:
                raise DynamicsError(f"VehicleParams.{name} must be strictly positive")
        if self.c_0 < 0.0 or self.c_1 < 0.0:
            raise DynamicsError("VehicleParams.c_0 and c_1 must be non-negative")
        if not 0.0 < self.delta_max < math.pi / 2.0:
            raise DynamicsError("VehicleParams.delta_max must lie in (0, pi/2)")

    @property
    def wheel_factor(self) -> float:
        """``R_wheel * gamma``: wheel speed to motor shaft conversion (m)."""
        return self.r_wheel * self.gamma

    @property
    def no_load_speed(self) -> float:
        """Forward speed at which drive torque vanishes at full throttle (m/s)."""
        return self.omega_0 * self.wheel_factor

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "VehicleParams":
        return cls(**{item.name: float(payload[item.name]) for item in fields(cls)})

    def perturbed(self, factors: Mapping[str, float]) -> "VehicleParams":
        """Return a copy with each named parameter multiplied by its factor."""
        known = {item.name for item in fields(self)}
        unknown = set(factors) - known
        if unknown:
            raise DynamicsError(f"Unknown vehicle parameters in perturbation: {sorted(unknown)}")
        return replace(self, **{name: getattr(self, name) * float(factor) for name, factor in factors.items()})


@dataclass(frozen=True)
class VehicleState:
    """Planar pose plus forward speed, ``q = [x, y, theta, v]``.

    ``theta`` is wrapped to (-pi, pi] on construction.
    """

    x: float
    y: float
    theta: float
    v: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(value) for value in (self.x, self.y, self.theta, self.v)):
            raise DynamicsError(f"VehicleState fields must be finite: {self}")
        if self.v < 0.0:
            raise DynamicsError(f"VehicleState.v must be non-negative, got {self.v}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.v], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "VehicleState":
        x, y, theta, v = (float(value) for value in values)
        return cls(x=x, y=y, theta=theta, v=max(v, 0.0))


@dataclass(frozen=True)
class ControlInput:
    """Throttle ``alpha`` in [0, 1] and steering ``delta`` (rad)."""

    alpha: float
    delta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.delta)):
            raise DynamicsError(f"ControlInput fields must be finite: {self}")
        if not 0.0 <= self.alpha <= 1.0:
            raise DynamicsError(f"ControlInput.alpha must lie in [0, 1], got {self.alpha}")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.delta], dtype=float)

    def within(self, params: VehicleParams) -> bool:
        return abs(self.delta) <= params.delta_max

    def clamped(self, params: VehicleParams) -> "ControlInput":
        return ControlInput(
            alpha=min(max(self.alpha, 0.0), 1.0),
            delta=min(max(self.delta, -params.delta_max), params.delta_max),
        )

    @classmethod
    def from_array(cls, values: np.ndarray, params: VehicleParams) -> "ControlInput":
        alpha, delta = (float(value) for value in values)
        return cls(
            alpha=min(max(alpha, 0.0), 1.0),
            delta=min(max(delta, -params.delta_max), params.delta_max),
        )
