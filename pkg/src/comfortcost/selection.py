"""Hard constraints and argmin selection over candidate trajectories."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .catalog import CostLike, evaluate_cost
from .costs import EvaluationContext, LeadingVehicleContext, brake_margin
from .dsl import CostBreakdown
from .errors import InvalidConfigError, MissingContextError, NoFeasibleCandidateError
from .geometry import distance_to_region
from .scenario import Scenario
from .trajectory import Trajectory


@dataclass(frozen=True)
class ResponseRatioConfig:
    """Planner response time [s] and the largest acceptable ``v*T/d``."""

    T_response: float
    max_ratio: float

    def __post_init__(self):
        if not (self.T_response > 0.0 and self.max_ratio > 0.0):
            raise InvalidConfigError("T_response and max_ratio must be positive")

    def required_clearance(self, v):
        return np.asarray(v, dtype=float) * self.T_response / self.max_ratio


def response_ratio(v, T, d):
    """``v*T/d``; infinite at zero distance."""
    v, d = np.asarray(v, dtype=float), np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(d > 0.0, v * T / np.where(d > 0.0, d, 1.0), np.inf)


@dataclass(frozen=True)
class Violation:
    constraint: str
    index: int
    magnitude: float


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def names(self) -> list[str]:
        return [v.constraint for v in self.violations]

    def as_dict(self) -> dict:
        return {"feasible": self.feasible,
                "violations": [{"constraint": v.constraint, "index": v.index, "magnitude": v.magnitude}
                               for v in self.violations]}


def _first(name, mask, excess, out):
    idx = np.flatnonzero(mask)
    if idx.size:
        i = int(idx[0])
        out.append(Violation(name, i, float(excess[i])))


def footprint_clearance(trajectory: Trajectory, scenario: Scenario) -> np.ndarray:
    """Clearance of the ego disc to the nearest obstacle per sample (inf without obstacles)."""
    if len(scenario.obstacles) == 0:
        return np.full(len(trajectory), np.inf)
    return scenario.obstacles.clearances(trajectory.x, trajectory.y).min(axis=1) - scenario.ego_radius


def check_constraints(trajectory: Trajectory, scenario: Scenario,
                      rc: Optional[ResponseRatioConfig] = None,
                      a_max: Optional[float] = None, delta_max: Optional[float] = None,
                      leading_vehicle: Optional[LeadingVehicleContext] = None) -> FeasibilityReport:
    """Collect violations in a fixed order.

    Collision, speed limit, goal region (and time window), response-ratio
    clearance, kinematic bounds, then the leader brake-distance margin.
    The kinematic bounds stand in for vehicle-dynamics feasibility.
    """
    out: list[Violation] = []
    clearance = footprint_clearance(trajectory, scenario)
    _first("collision", clearance <= 0.0, -clearance, out)
    _first("speed_limit", trajectory.v > scenario.speed_limit, trajectory.v - scenario.speed_limit, out)

    last = len(trajectory) - 1
    if scenario.goal_region is not None:
        miss = distance_to_region(scenario.goal_region, trajectory.x[-1], trajectory.y[-1])
        if miss > 0.0:
            out.append(Violation("goal_region", last, miss))
    if scenario.goal_time_window is not None:
        lo, hi = scenario.goal_time_window
        tf = trajectory.tf
        if tf < lo or tf > hi:
            out.append(Violation("goal_time", last, float(lo - tf if tf < lo else tf - hi)))

    if rc is not None:
        required = rc.required_clearance(trajectory.v)
        _first("response_ratio", clearance < required, required - clearance, out)

    if a_max is not None:
        a = np.abs(trajectory.a)
        _first("acceleration", a > a_max, a - a_max, out)
    if delta_max is not None:
        delta = np.abs(trajectory.delta)
        _first("steering_angle", delta > delta_max, delta - delta_max, out)

    if leading_vehicle is not None:
        margin = brake_margin(trajectory, leading_vehicle)
        _first("brake_distance", margin < 0.0, -margin, out)
    return FeasibilityReport(tuple(out))


@dataclass(frozen=True)
class Selection:
    index: int
    total: float
    breakdown: CostBreakdown
    reports: tuple[FeasibilityReport, ...] = field(default=(), repr=False)
    costs: tuple[Optional[float], ...] = field(default=(), repr=False)


def _leader_or_none(trajectory, ctx):
    try:
        return ctx.leading_for(trajectory)
    except MissingContextError:
        return None


def select_best(candidates: Sequence[Trajectory], cost: CostLike, ctx: EvaluationContext,
                scenario: Optional[Scenario] = None, a_max: Optional[float] = None,
                delta_max: Optional[float] = None) -> Selection:
    """Minimum-cost feasible candidate; ties go to the lowest index.

    Infeasible candidates are never evaluated and get ``None`` in ``costs``.
    """
    if not candidates:
        raise InvalidConfigError("no candidates to select from")
    scenario = scenario if scenario is not None else ctx.scenario
    if scenario is None:
        raise MissingContextError("selection needs a scenario for the hard constraints", ["scenario"])
    if ctx.scenario is None:
        ctx = replace(ctx, scenario=scenario)
    reports, costs = [], []
    best = None
    for i, traj in enumerate(candidates):
        report = check_constraints(traj, scenario, ctx.response_config, a_max, delta_max,
                                   _leader_or_none(traj, ctx))
        reports.append(report)
        if not report.feasible:
            costs.append(None)
            continue
        breakdown = evaluate_cost(cost, traj, ctx)
        costs.append(breakdown.total)
        if best is None or breakdown.total < best[1].total:
            best = (i, breakdown)
    if best is None:
        raise NoFeasibleCandidateError(reports)
    return Selection(best[0], best[1].total, best[1], tuple(reports), tuple(costs))
