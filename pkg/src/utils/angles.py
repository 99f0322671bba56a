"""Angle helpers shared by the dynamics, estimator and controller."""

from __future__ import annotations

import math


def wrap_angle(angle: float) -> float:
    """Wrap ``angle`` (rad) onto the half-open branch (-pi, pi].

    Angles already on the branch come back unchanged, bit for bit.
    """
    if -math.pi < angle <= math.pi:
        return float(angle)
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi
