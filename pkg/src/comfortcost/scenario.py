"""Scenario: base path, obstacles, limits, goal and desired profiles."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .frenet import FrenetFrame, build_frenet_frame
from .geometry import ObstacleSet, Shape
from .trajectory import BasePath

# Wei's distance-keeper constants.
WEI_D_L_MIN = 5.0
WEI_K_GAIN = 1.14
WEI_T_RESPONSE = 0.6
# distance at which a virtual leader is placed when none is detected
VIRTUAL_LEADER_GAP = 150.0


@dataclass(frozen=True, eq=False)
class Profile:
    """Piecewise-linear function of arc length, held constant past the ends."""

    s: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float).ravel()
        value = np.array(self.value, dtype=float).ravel()
        if s.shape != value.shape or s.size == 0:
            raise InvalidInputError("profile needs matching, non-empty s and value arrays")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(value))):
            raise InvalidInputError("profile values must be finite")
        if np.any(np.diff(s) <= 0.0):
            raise InvalidInputError("profile s must be strictly increasing")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "value", value)

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls([0.0], [value])

    def __call__(self, s):
        return np.interp(s, self.s, self.value)


@dataclass(frozen=True, eq=False)
class LeadingVehicleTrace:
    """Leading vehicle's arc-length position and speed over time, plus Wei's constants."""

    t: np.ndarray
    s: np.ndarray
    v: np.ndarray
    a_maxdec: float
    d_l_min: float = WEI_D_L_MIN
    k_gain: float = WEI_K_GAIN
    T_response: float = WEI_T_RESPONSE

    def __post_init__(self):
        for name in ("t", "s", "v"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float).ravel())
        if not (self.t.shape == self.s.shape == self.v.shape) or self.t.size == 0:
            raise InvalidInputError("leading vehicle trace needs matching t, s, v arrays")
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0.0):
            raise InvalidInputError("leading vehicle timestamps must be strictly increasing")


@dataclass(frozen=True, eq=False)
class Scenario:
    base_path: BasePath
    speed_limit: float
    obstacles: ObstacleSet = ObstacleSet()
    goal_region: Optional[Shape] = None
    goal_time_window: Optional[tuple[float, float]] = None
    v_des: Optional[Profile] = None
    theta_des: Optional[Profile] = None
    leading_vehicle: Optional[LeadingVehicleTrace] = None
    ego_radius: float = 1.0
    frame_spacing: float = 0.5

    def __post_init__(self):
        if not isinstance(self.base_path, BasePath):
            object.__setattr__(self, "base_path", BasePath(self.base_path))
        if not self.speed_limit > 0.0:
            raise InvalidInputError(f"speed_limit must be positive, got {self.speed_limit}")
        if self.ego_radius < 0.0:
            raise InvalidInputError("ego_radius must be non-negative")
        if self.goal_time_window is not None:
            lo, hi = self.goal_time_window
            if not lo <= hi:
                raise InvalidInputError("goal time window must satisfy start <= end")

    @cached_property
    def frame(self) -> FrenetFrame:
        return build_frenet_frame(self.base_path, self.frame_spacing)

    def desired_heading(self, s):
        """``theta_des`` if given, else the base path's own heading."""
        if self.theta_des is not None:
            return self.theta_des(s)
        return self.frame.heading(s)
