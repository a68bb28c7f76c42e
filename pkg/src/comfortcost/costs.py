"""Partial cost functions.

Every running partial is the trapezoidal integral of a per-sample integrand
over the trajectory's own time grid; terminal partials read the final state.
Partials are unweighted; weights belong to :mod:`comfortcost.dsl`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import (InvalidContextError, InvalidModelError, MissingContextError,
                     NoOverlapError, UnknownPartialError)
from .frenet import FrenetFrame, to_frenet_many
from .geometry import ObstacleSet, distance_to_region
from .scenario import VIRTUAL_LEADER_GAP, WEI_D_L_MIN, WEI_K_GAIN, WEI_T_RESPONSE, Scenario
from .trajectory import Trajectory, pointwise_curvature, wrap_angle

if TYPE_CHECKING:
    from .catalog import DuWeightConfig
    from .selection import ResponseRatioConfig

RUNNING_IDS = ("A", "J", "SA", "SR", "E", "Y", "LC", "V", "O", "D", "L")
TERMINAL_IDS = ("T", "TO", "TG")
EXTENDED_IDS = ("K", "C", "LV", "BD")
REGISTRY = RUNNING_IDS + TERMINAL_IDS + EXTENDED_IDS
ALIASES = {"κ": "K"}


def canonical_id(cost_id: str) -> str:
    cid = ALIASES.get(cost_id, cost_id)
    if cid not in REGISTRY:
        raise UnknownPartialError(cost_id)
    return cid


@dataclass(frozen=True)
class FuelModel:
    """Engine efficiency, fuel lower heating value [J/kg], fuel density [kg/m^3]."""

    eta: float
    H: float = 42.6e6
    rho: float = 0.745


class FuelPower(NamedTuple):
    power: np.ndarray
    fuel_flow: np.ndarray


def fuel_power(F, v, model: FuelModel) -> FuelPower:
    """Engine power ``F*v/eta`` and the fuel flow ``P/(H*rho)`` it implies."""
    if not model.eta > 0.0 or not model.H > 0.0 or not model.rho > 0.0:
        raise InvalidModelError(f"fuel model parameters must be positive: {model}")
    power = np.asarray(F, dtype=float) * np.asarray(v, dtype=float) / model.eta
    flow = power / (model.H * model.rho)
    if np.ndim(power) == 0:
        return FuelPower(float(power), float(flow))
    return FuelPower(power, flow)


@dataclass(frozen=True, eq=False)
class LeadingVehicleContext:
    """Per-sample gap ``d_l`` and leader speed ``v_l`` aligned with the ego trajectory."""

    d_l: np.ndarray
    v_l: np.ndarray
    a_maxdec: float
    d_l_min: float = WEI_D_L_MIN
    k_gain: float = WEI_K_GAIN
    T_response: float = WEI_T_RESPONSE

    def __post_init__(self):
        d_l = np.array(self.d_l, dtype=float).ravel()
        v_l = np.array(self.v_l, dtype=float).ravel()
        if d_l.shape != v_l.shape:
            raise InvalidContextError("d_l and v_l must have the same length")
        if np.any(d_l < 0.0):
            raise InvalidContextError("gap to the leading vehicle must be non-negative")
        object.__setattr__(self, "d_l", d_l)
        object.__setattr__(self, "v_l", v_l)

    def desired_gap(self, v):
        return self.d_l_min + self.k_gain * np.asarray(v, dtype=float)


@dataclass(frozen=True, eq=False)
class EvaluationContext:
    """Everything a partial may need besides the trajectory itself."""

    scenario: Optional[Scenario] = None
    previous_trajectory: Optional[Trajectory] = None
    leading_vehicle: Optional[LeadingVehicleContext] = None
    fuel_model: Optional[FuelModel] = None
    traction_force: Optional[np.ndarray] = None
    du_config: Optional["DuWeightConfig"] = None
    response_config: Optional["ResponseRatioConfig"] = None

    def require_scenario(self, cost_id: str) -> Scenario:
        if self.scenario is None:
            raise MissingContextError(f"partial {cost_id} needs a scenario", [cost_id])
        return self.scenario

    def leading_for(self, trajectory: Trajectory, cost_id: str = "LV") -> LeadingVehicleContext:
        if self.leading_vehicle is not None:
            return self.leading_vehicle
        if self.scenario is not None and self.scenario.leading_vehicle is not None:
            return leading_context(trajectory, self.scenario)
        raise MissingContextError(f"partial {cost_id} needs a leading vehicle", [cost_id])


def frenet_coordinates(trajectory: Trajectory, frame: FrenetFrame):
    """``(s, d)`` of every sample; samples past the path ends use the end tangents.

    Results are cached on the trajectory per frame and returned read-only.
    """
    hit = trajectory._frenet.get(id(frame))
    if hit is not None and hit[0] is frame:
        return hit[1], hit[2]
    s, d = to_frenet_many(frame, trajectory.x, trajectory.y, extrapolate=True)
    s.flags.writeable = False
    d.flags.writeable = False
    trajectory._frenet[id(frame)] = (frame, s, d)
    return s, d


def leading_context(trajectory: Trajectory, scenario: Scenario) -> LeadingVehicleContext:
    """Sample the scenario's leader trace on the trajectory's time grid.

    The gap is the arc-length difference along the base path, floored at 0.
    """
    trace = scenario.leading_vehicle
    if trace is None:
        raise MissingContextError("scenario has no leading vehicle", ["LV", "BD"])
    s_ego, _ = frenet_coordinates(trajectory, scenario.frame)
    s_lead = np.interp(trajectory.t, trace.t, trace.s)
    v_lead = np.interp(trajectory.t, trace.t, trace.v)
    return LeadingVehicleContext(
        d_l=np.maximum(s_lead - s_ego, 0.0), v_l=v_lead, a_maxdec=trace.a_maxdec,
        d_l_min=trace.d_l_min, k_gain=trace.k_gain, T_response=trace.T_response,
    )


def virtual_leader(trajectory: Trajectory, scenario: Scenario, a_maxdec: float) -> LeadingVehicleContext:
    """Leader placed 150 m ahead of the start, driving at the speed limit."""
    s_ego, _ = frenet_coordinates(trajectory, scenario.frame)
    s_lead = s_ego[0] + VIRTUAL_LEADER_GAP + scenario.speed_limit * (trajectory.t - trajectory.t0)
    return LeadingVehicleContext(
        d_l=np.maximum(s_lead - s_ego, 0.0), v_l=np.full(len(trajectory), scenario.speed_limit),
        a_maxdec=a_maxdec,
    )


def integrate(values, trajectory: Trajectory) -> float:
    return float(kernels.trapezoid(np.ascontiguousarray(values, dtype=float), trajectory.t))


# --------------------------------------------------------------------------
# extended partials


def obstacle_proximity_integrand(trajectory: Trajectory, obstacles: ObstacleSet) -> np.ndarray:
    """``max_i max(0, 1 - clearance_i / d_influence)`` per sample."""
    if len(obstacles) == 0:
        return np.zeros(len(trajectory))
    clear = np.maximum(obstacles.clearances(trajectory.x, trajectory.y), 0.0)
    xi = np.maximum(0.0, 1.0 - clear / obstacles.d_influence)
    return xi.max(axis=1)


def obstacle_proximity(trajectory: Trajectory, obstacles: ObstacleSet) -> float:
    return integrate(obstacle_proximity_integrand(trajectory, obstacles), trajectory)


def max_curvature_cost(trajectory: Trajectory) -> float:
    return float(np.max(np.abs(pointwise_curvature(trajectory))))


def _sorted_profile(s, d):
    order = np.argsort(s, kind="stable")
    return s[order], d[order]


def consistency_cost(current: Trajectory, previous: Trajectory, frame: FrenetFrame) -> float:
    """Mean lateral distance between two trajectories over their shared arc-length span."""
    s_c, d_c = _sorted_profile(*frenet_coordinates(current, frame))
    s_p, d_p = _sorted_profile(*frenet_coordinates(previous, frame))
    s1 = max(s_c[0], s_p[0])
    s2 = min(s_c[-1], s_p[-1])
    if not s2 > s1:
        raise NoOverlapError(f"trajectories share no arc-length interval ([{s_c[0]}, {s_c[-1]}] vs "
                             f"[{s_p[0]}, {s_p[-1]}])")
    grid = np.concatenate([s_c, s_p, [s1, s2]])
    grid = np.unique(grid[(grid >= s1) & (grid <= s2)])
    lateral = np.abs(np.interp(grid, s_c, d_c) - np.interp(grid, s_p, d_p))
    return float(kernels.trapezoid(lateral, grid)) / (s2 - s1)


def _check_aligned(trajectory: Trajectory, lv: LeadingVehicleContext):
    if lv.d_l.shape[0] != len(trajectory):
        raise InvalidContextError(
            f"leading vehicle has {lv.d_l.shape[0]} samples, trajectory has {len(trajectory)}")


def gap_cost(trajectory: Trajectory, lv: LeadingVehicleContext) -> float:
    """Integral of the squared gap error to the speed-dependent desired gap."""
    _check_aligned(trajectory, lv)
    err = lv.desired_gap(trajectory.v) - lv.d_l
    return integrate(err * err, trajectory)


def brake_margin(trajectory: Trajectory, lv: LeadingVehicleContext) -> np.ndarray:
    """Leader stopping distance plus gap minus ego reaction and stopping distance."""
    _check_aligned(trajectory, lv)
    if not lv.a_maxdec > 0.0:
        raise InvalidContextError(f"a_maxdec must be positive, got {lv.a_maxdec}")
    v = trajectory.v
    return (lv.d_l + 0.5 * lv.v_l**2 / lv.a_maxdec
            - v * lv.T_response - 0.5 * v**2 / lv.a_maxdec)


def brake_distance_cost(trajectory: Trajectory, lv: LeadingVehicleContext) -> float:
    m = brake_margin(trajectory, lv)
    return integrate(m * m, trajectory)


# --------------------------------------------------------------------------
# dispatch


def _lane_offsets(trajectory, ctx, cost_id):
    scenario = ctx.require_scenario(cost_id)
    return frenet_coordinates(trajectory, scenario.frame)


def _energy_integrand(trajectory, ctx):
    missing = [name for name, val in (("fuel_model", ctx.fuel_model), ("traction_force", ctx.traction_force))
               if val is None]
    if missing:
        raise MissingContextError(f"partial E needs {' and '.join(missing)}", ["E"])
    force = np.asarray(ctx.traction_force, dtype=float).ravel()
    if force.shape[0] != len(trajectory):
        raise InvalidContextError(
            f"traction force has {force.shape[0]} samples, trajectory has {len(trajectory)}")
    p = fuel_power(force, trajectory.v, ctx.fuel_model).power
    return p * p


def running_integrand(cost_id: str, trajectory: Trajectory, ctx: EvaluationContext) -> np.ndarray:
    """Per-sample integrand of a running partial."""
    if cost_id == "A":
        return trajectory.a**2
    if cost_id == "J":
        return trajectory.jerk**2
    if cost_id == "SA":
        return trajectory.delta**2
    if cost_id == "SR":
        return trajectory.delta_rate**2
    if cost_id == "E":
        return _energy_integrand(trajectory, ctx)
    if cost_id == "Y":
        return trajectory.yaw_rate**2
    if cost_id == "LC":
        _, d = _lane_offsets(trajectory, ctx, cost_id)
        return d * d
    if cost_id == "V":
        scenario = ctx.require_scenario(cost_id)
        if scenario.v_des is None:
            raise MissingContextError("partial V needs a desired-velocity profile", ["V"])
        s, _ = frenet_coordinates(trajectory, scenario.frame)
        return (scenario.v_des(s) - trajectory.v) ** 2
    if cost_id == "O":
        s, _ = _lane_offsets(trajectory, ctx, cost_id)
        return wrap_angle(ctx.scenario.desired_heading(s) - trajectory.theta) ** 2
    if cost_id == "D":
        scenario = ctx.require_scenario(cost_id)
        return obstacle_proximity_integrand(trajectory, scenario.obstacles)
    if cost_id == "L":
        return np.array(trajectory.v)
    raise UnknownPartialError(cost_id)


def running_cost(cost_id: str, trajectory: Trajectory, ctx: EvaluationContext) -> float:
    """Running partial: one of the base ids or the K, C, LV, BD extensions."""
    cost_id = canonical_id(cost_id)
    if cost_id in TERMINAL_IDS:
        raise UnknownPartialError(cost_id)
    if cost_id == "K":
        return max_curvature_cost(trajectory)
    if cost_id == "C":
        if ctx.previous_trajectory is None:
            raise MissingContextError("partial C needs the previous trajectory", ["C"])
        scenario = ctx.require_scenario(cost_id)
        return consistency_cost(trajectory, ctx.previous_trajectory, scenario.frame)
    if cost_id == "LV":
        return gap_cost(trajectory, ctx.leading_for(trajectory, "LV"))
    if cost_id == "BD":
        return brake_distance_cost(trajectory, ctx.leading_for(trajectory, "BD"))
    return integrate(running_integrand(cost_id, trajectory, ctx), trajectory)


def terminal_cost(cost_id: str, trajectory: Trajectory, ctx: EvaluationContext) -> float:
    cost_id = canonical_id(cost_id)
    if cost_id == "T":
        return trajectory.tf
    if cost_id == "TO":
        scenario = ctx.require_scenario(cost_id)
        _, d = to_frenet_many(scenario.frame, trajectory.x[-1:], trajectory.y[-1:], extrapolate=True)
        return float(d[0] ** 2)
    if cost_id == "TG":
        scenario = ctx.require_scenario(cost_id)
        if scenario.goal_region is None:
            raise MissingContextError("partial TG needs a goal region", ["TG"])
        return distance_to_region(scenario.goal_region, trajectory.x[-1], trajectory.y[-1]) ** 2
    raise UnknownPartialError(cost_id)


def partial_cost(cost_id: str, trajectory: Trajectory, ctx: EvaluationContext) -> float:
    cost_id = canonical_id(cost_id)
    if cost_id in TERMINAL_IDS:
        return terminal_cost(cost_id, trajectory, ctx)
    return running_cost(cost_id, trajectory, ctx)
