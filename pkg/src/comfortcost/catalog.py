"""Named cost functions from the surveyed planners, and Du's conditional weights."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .costs import EvaluationContext, frenet_coordinates, integrate
from .dsl import CostBreakdown, CostSpec, TermValue, evaluate, parse_cost_expr
from .errors import CatalogLookupError, InvalidConfigError, MissingContextError
from .trajectory import StateSample, Trajectory, wrap_angle

# Arnay's empirically found base configuration, keyed by partial id.
ARNAY_BASE_WEIGHTS = {"LC": 0.17, "D": 0.2, "C": 0.02, "L": 0.7, "K": 0.01}


@dataclass(frozen=True)
class DuWeightConfig:
    """Thresholds and weights of Du's state-dependent terms.

    ``a_max`` and ``v_max`` have no published values and must be given.
    """

    a_max: float
    v_max: float
    w4: float = 1.0
    w5_0: float = 1.0
    w6_0: float = 1.0
    w7_0: float = 1.0
    d_thresh: float = 0.3
    theta_thresh: float = 0.09

    def __post_init__(self):
        for name in ("a_max", "d_thresh", "theta_thresh"):
            if not getattr(self, name) > 0.0:
                raise InvalidConfigError(f"{name} must be positive, got {getattr(self, name)}")


def du_condition1(sample: StateSample, d: float, theta_err: float, cfg: DuWeightConfig) -> bool:
    """Forward acceleration in a dangerous state: too hard, off-centre, or mis-aligned."""
    return bool(sample.a_tan > 0.0 and (sample.a > cfg.a_max or d > cfg.d_thresh
                                        or theta_err > cfg.theta_thresh))


def du_condition1_mask(a_tan, a, d, theta_err, cfg: DuWeightConfig) -> np.ndarray:
    a_tan = np.asarray(a_tan)
    return (a_tan > 0.0) & ((np.asarray(a) > cfg.a_max) | (np.asarray(d) > cfg.d_thresh)
                            | (np.asarray(theta_err) > cfg.theta_thresh))


def xd1_spec(w1: float = 1.0, w2: float = 1.0, w3: float = 1.0) -> CostSpec:
    """Linear part of Du's cost: lane centre, orientation, steering rate."""
    return CostSpec((("LC", w1), ("O", w2), ("SR", w3)))


def du_time_weights(trajectory: Trajectory, ctx: EvaluationContext, cfg: DuWeightConfig):
    """Sample-wise ``(w5, w6, w7)`` and the condition1 mask for a trajectory."""
    scenario = ctx.require_scenario("XD1")
    s, d = frenet_coordinates(trajectory, scenario.frame)
    theta_err = wrap_angle(scenario.desired_heading(s) - trajectory.theta)
    cond = du_condition1_mask(trajectory.a_tan, trajectory.a, d, theta_err, cfg)
    w5 = np.where(trajectory.a > cfg.a_max, cfg.w5_0, 0.0)
    w6 = np.where(cond, cfg.w6_0, 0.0)
    w7 = np.where(cond, 0.0, cfg.w7_0)
    return w5, w6, w7, cond


def evaluate_xd1(trajectory: Trajectory, ctx: EvaluationContext, cfg: Optional[DuWeightConfig] = None,
                 spec: Optional[CostSpec] = None) -> CostBreakdown:
    """Du's cost: the linear spec plus four terms with sample-wise weights.

    ``w5(t) = w5_0 [a > a_max]`` multiplies ``a^2``; ``w4 a_tan^2`` is always on;
    ``w6(t) = w6_0 [condition1]`` multiplies ``sgn(a_tan) a_tan^2`` and
    ``w7(t) = w7_0 [not condition1]`` multiplies ``(v_max - v)^2``. The
    breakdown reports each of these with its base weight.
    """
    cfg = cfg if cfg is not None else ctx.du_config
    if cfg is None:
        raise MissingContextError("XD1 needs a DuWeightConfig", ["XD1"])
    linear = evaluate(spec if spec is not None else xd1_spec(), trajectory, ctx)
    _, _, _, cond = du_time_weights(trajectory, ctx, cfg)
    a, a_tan = trajectory.a, trajectory.a_tan

    extra = (
        TermValue("A*w5(t)", cfg.w5_0, integrate(np.where(a > cfg.a_max, a * a, 0.0), trajectory)),
        TermValue("a_tan^2", cfg.w4, integrate(a_tan * a_tan, trajectory)),
        TermValue("sgn(a_tan)a_tan^2*w6(t)", cfg.w6_0,
                  integrate(np.where(cond, np.sign(a_tan) * a_tan * a_tan, 0.0), trajectory)),
        TermValue("(v_max-v)^2*w7(t)", cfg.w7_0,
                  integrate(np.where(cond, 0.0, (cfg.v_max - trajectory.v) ** 2), trajectory)),
    )
    total = linear.total
    for tv in extra:
        total += tv.weighted
    return CostBreakdown(total, linear.terms + extra)


@dataclass(frozen=True)
class NamedCost:
    name: str
    spec: CostSpec
    description: str = ""
    extra: Optional[Callable[..., CostBreakdown]] = None

    def evaluate(self, trajectory: Trajectory, ctx: EvaluationContext = None) -> CostBreakdown:
        ctx = ctx if ctx is not None else EvaluationContext()
        if self.extra is not None:
            return self.extra(trajectory, ctx, spec=self.spec)
        return evaluate(self.spec, trajectory, ctx)


def fm1_spec(w1: float = 1.0, w2: float = 1.0, w2_energy: Optional[float] = None) -> CostSpec:
    """Mohseni's acceleration, jerk and energy cost; the energy weight defaults to the jerk weight."""
    return CostSpec((("A", w1), ("J", w2), ("E", w2 if w2_energy is None else w2_energy)))


def rai_spec(weights=None) -> CostSpec:
    """Arnay's five-term cost for an arbitrary weight map (defaults to the base configuration)."""
    w = dict(ARNAY_BASE_WEIGHTS if weights is None else weights)
    return CostSpec(tuple((cid, w[cid]) for cid in ("D", "L", "LC", "K", "C") if cid in w))


def comfort_spec(w1: float = 1.0, w2: float = 1.0) -> CostSpec:
    return CostSpec((("A", w1), ("J", w2)))


CATALOG: dict[str, NamedCost] = {
    nc.name: nc
    for nc in (
        NamedCost("FM1", fm1_spec(), "Mohseni 2017 fuel and comfort; weights unpublished, default 1"),
        NamedCost("XD1", xd1_spec(), "Du 2016 NMPC cost with conditional weights w5..w7",
                  extra=evaluate_xd1),
        NamedCost("JW1", parse_cost_expr("[(LV|50),(A|10),(BD|30),(D|20)]"), "Wei 2010 distance keeper"),
        NamedCost("RA1", parse_cost_expr("[(D|0.2),(L|0.2),(LC|0.17),(K|0.01),(C|0.02)]"),
                  "Arnay 2016, best set by obstacle distance and lane centre"),
        NamedCost("RA2", parse_cost_expr("[(D|0.1),(L|0.7),(LC|0.17),(K|0.01),(C|0.02)]"),
                  "Arnay 2016, best set by obstacle distance, lane centre, speed and curvature"),
        NamedCost("KC1", parse_cost_expr("[(D|0.1),(K|0.01),(C|0.02)]"), "Chu 2012"),
    )
}


def catalog_lookup(name: str) -> NamedCost:
    key = name[1:] if name.startswith("@") else name
    try:
        return CATALOG[key]
    except KeyError:
        raise CatalogLookupError(name) from None


CostLike = Union[CostSpec, NamedCost]


def resolve_cost(text: str) -> CostLike:
    """``"@NAME"`` looks up the catalog; anything else is parsed as a DSL expression."""
    text = text.strip()
    if text.startswith("@"):
        return catalog_lookup(text)
    return parse_cost_expr(text)


def evaluate_cost(cost: CostLike, trajectory: Trajectory, ctx: EvaluationContext = None) -> CostBreakdown:
    if isinstance(cost, NamedCost):
        return cost.evaluate(trajectory, ctx)
    return evaluate(cost, trajectory, ctx)


def spec_of(cost: CostLike) -> CostSpec:
    return cost.spec if isinstance(cost, NamedCost) else cost
