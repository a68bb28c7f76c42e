"""Composable trajectory cost functions for on-road motion planning."""
from .catalog import (ARNAY_BASE_WEIGHTS, CATALOG, DuWeightConfig, NamedCost, catalog_lookup,
                      du_condition1, evaluate_cost, evaluate_xd1, resolve_cost)
from .costs import (EvaluationContext, FuelModel, LeadingVehicleContext, brake_distance_cost,
                    consistency_cost, fuel_power, gap_cost, max_curvature_cost, obstacle_proximity,
                    partial_cost, running_cost, terminal_cost)
from .dsl import CostBreakdown, CostSpec, evaluate, format_cost_expr, parse_cost_expr
from .errors import *  # noqa: F401,F403
from .experiment import MetricRow, SweepConfig, rank_weight_sets, reference_scenario, run_sweep
from .frenet import (CandidateConfig, FrenetFrame, build_frenet_frame, from_frenet, generate_candidates,
                     to_frenet)
from .geometry import ConvexPolygon, Disc, ObstacleSet
from .kernels import BACKEND
from .scenario import LeadingVehicleTrace, Profile, Scenario
from .selection import (FeasibilityReport, ResponseRatioConfig, Violation, check_constraints,
                        response_ratio, select_best)
from .trajectory import (BasePath, StateSample, Trajectory, derive_kinematics, pointwise_curvature,
                         resample_by_arclength)

__version__ = "0.1.0"
