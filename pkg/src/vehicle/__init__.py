from .models import ControlInput, VehicleParams, VehicleState
from .dynamics import (
    motion_jacobian,
    motor_drive_torque,
    motor_resistance_torque,
    reference_steering,
    state_derivative,
    steady_state_throttle,
    step,
)

__all__ = [
    "ControlInput",
    "VehicleParams",
    "VehicleState",
    "motion_jacobian",
    "motor_drive_torque",
    "motor_resistance_torque",
    "reference_steering",
    "state_derivative",
    "steady_state_throttle",
    "step",
]
