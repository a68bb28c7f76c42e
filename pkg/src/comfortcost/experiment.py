"""One-at-a-time weight sweeps and weight-set ranking on a fixed scenario."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .catalog import ARNAY_BASE_WEIGHTS, CostLike, NamedCost, spec_of
from .costs import EvaluationContext, canonical_id, running_cost
from .dsl import CostSpec, format_cost_expr, format_weight
from .errors import InvalidConfigError, NoFeasibleCandidateError, UnknownPartialError
from .frenet import CandidateConfig, generate_candidates
from .geometry import ConvexPolygon, Disc, ObstacleSet
from .scenario import Scenario
from .selection import select_best
from .trajectory import BasePath, Trajectory

DEFAULT_GRID = tuple(round(0.1 * i, 10) for i in range(11))
METRICS = ("lane_center", "obstacle_distance", "speed", "curvature")
# partial behind each metric, and whether a larger raw value is better
METRIC_PARTIAL = {"lane_center": "LC", "obstacle_distance": "D", "speed": "L", "curvature": "K"}
HIGHER_IS_BETTER = {"lane_center": False, "obstacle_distance": False, "speed": True, "curvature": False}
RANKING_SCORE = "sum of min-max normalised metrics, equally weighted; speed inverted"


def reference_scenario() -> Scenario:
    """Straight 100 m road with one small disc obstacle 1.5 m left of s = 50 m.

    A desk-scale stand-in for a sweep scenario, not any published test track.
    """
    return Scenario(
        base_path=BasePath([[0.0, 0.0], [100.0, 0.0]]),
        speed_limit=15.0,
        obstacles=ObstacleSet((Disc((50.0, 1.5), 0.25),), d_influence=3.0),
        goal_region=ConvexPolygon([[50.0, -6.0], [100.0, -6.0], [100.0, 6.0], [50.0, 6.0]]),
        ego_radius=1.0,
    )


def reference_candidate_config() -> CandidateConfig:
    return CandidateConfig(
        lateral_offsets=tuple(np.round(np.arange(-3.0, 3.0001, 0.25), 10)),
        horizon=20.0, speed=5.0, sample_spacing=1.0,
    )


# starts 15 m before the obstacle so candidates pass it mid-manoeuvre
REFERENCE_START = (35.0, 0.0, 0.0)


@dataclass(frozen=True)
class SweepConfig:
    base_weights: Mapping[str, float] = field(default_factory=lambda: dict(ARNAY_BASE_WEIGHTS))
    swept_id: str = "LC"
    grid: tuple = DEFAULT_GRID
    scenario: Scenario = field(default_factory=reference_scenario)
    candidate_config: CandidateConfig = field(default_factory=reference_candidate_config)
    start: tuple = REFERENCE_START
    previous: Optional[Trajectory] = None

    def __post_init__(self):
        weights = dict(CostSpec.from_weights(self.base_weights).terms)
        try:
            swept = canonical_id(self.swept_id)
        except UnknownPartialError:
            raise InvalidConfigError(f"unknown swept id {self.swept_id!r}") from None
        if swept not in weights:
            raise InvalidConfigError(f"swept id {self.swept_id!r} is not among the base weights")
        grid = tuple(float(g) for g in self.grid)
        if not grid or not all(math.isfinite(g) for g in grid):
            raise InvalidConfigError("grid must be non-empty and finite")
        object.__setattr__(self, "base_weights", weights)
        object.__setattr__(self, "swept_id", swept)
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class MetricRow:
    swept_value: float
    lane_center_metric: float
    obstacle_distance_metric: float
    speed_metric: float
    curvature_metric: float
    feasible: bool = True
    selected_index: int = -1
    total_cost: float = math.nan

    def metric(self, name: str) -> float:
        return getattr(self, f"{name}_metric")


def previous_for(scenario: Scenario, start, config: CandidateConfig) -> Trajectory:
    """Stand-in for last cycle's choice: hold the current lateral offset."""
    keep = CandidateConfig((float(start[1]),), config.horizon, config.speed, config.sample_spacing)
    return generate_candidates(scenario.frame, (start[0], start[1], 0.0), keep)[0]


def winner_metrics(trajectory: Trajectory, ctx: EvaluationContext) -> dict:
    return {m: running_cost(METRIC_PARTIAL[m], trajectory, ctx) for m in METRICS}


def _select_row(value, cost: CostLike, candidates, ctx) -> MetricRow:
    try:
        sel = select_best(candidates, cost, ctx)
    except NoFeasibleCandidateError:
        return MetricRow(value, math.nan, math.nan, math.nan, math.nan, feasible=False)
    m = winner_metrics(candidates[sel.index], ctx)
    return MetricRow(value, m["lane_center"], m["obstacle_distance"], m["speed"], m["curvature"],
                     True, sel.index, sel.total)


def run_sweep(cfg: SweepConfig) -> list[MetricRow]:
    """Vary one weight over the grid with the others at their base values.

    Rows follow grid order; a grid point without feasible candidates yields a
    row with ``feasible=False`` and NaN metrics.
    """
    frame = cfg.scenario.frame
    candidates = generate_candidates(frame, cfg.start, cfg.candidate_config)
    previous = cfg.previous if cfg.previous is not None else previous_for(
        cfg.scenario, cfg.start, cfg.candidate_config)
    ctx = EvaluationContext(scenario=cfg.scenario, previous_trajectory=previous)
    rows = []
    for value in cfg.grid:
        weights = dict(cfg.base_weights)
        weights[cfg.swept_id] = value
        rows.append(_select_row(value, CostSpec.from_weights(weights), candidates, ctx))
    return rows


def sweep_metadata(cfg: SweepConfig) -> dict:
    c = cfg.candidate_config
    return {
        "swept_id": cfg.swept_id,
        "base_weights": format_cost_expr(CostSpec.from_weights(cfg.base_weights)),
        "grid": ",".join(format_weight(g) for g in cfg.grid),
        "start": ",".join(format_weight(float(v)) for v in cfg.start),
        "lateral_offsets": ",".join(format_weight(o) for o in c.lateral_offsets),
        "horizon": format_weight(c.horizon),
        "speed": format_weight(c.speed),
        "sample_spacing": format_weight(c.sample_spacing),
        "metric_partials": ",".join(f"{m}={METRIC_PARTIAL[m]}" for m in METRICS),
    }


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def format_table(header: Sequence[str], rows: Sequence[Sequence], metadata: Mapping[str, str]) -> str:
    """Comma-delimited table preceded by a ``# key: value`` metadata block."""
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


SWEEP_HEADER = ("swept_value", "lane_center", "obstacle_distance", "speed", "curvature",
                "feasible", "selected_index", "total_cost")


def sweep_table(cfg: SweepConfig, rows: Sequence[MetricRow]) -> str:
    body = [(r.swept_value, r.lane_center_metric, r.obstacle_distance_metric, r.speed_metric,
             r.curvature_metric, r.feasible, r.selected_index, r.total_cost) for r in rows]
    return format_table(SWEEP_HEADER, body, sweep_metadata(cfg))


@dataclass(frozen=True)
class RankEntry:
    rank: int
    set_index: int
    label: str
    score: float
    metrics: dict
    normalized: dict


def _label(item) -> str:
    if isinstance(item, NamedCost):
        return "@" + item.name
    return format_cost_expr(spec_of(item) if isinstance(item, CostSpec) else CostSpec.from_weights(item))


def rank_weight_sets(sets: Sequence, metric_ids: Sequence[str] = METRICS,
                     scenario: Optional[Scenario] = None, candidate_config: Optional[CandidateConfig] = None,
                     start=REFERENCE_START, previous: Optional[Trajectory] = None) -> list[RankEntry]:
    """Rank weight sets by the metrics of the trajectory each one selects.

    Each metric is min-max normalised across the feasible sets (0 = best);
    speed is inverted because faster is better. Score is the plain sum and
    lower ranks first. Ties keep input order, except that repeats of an
    identical set sit right after its first occurrence. Sets whose selection
    is infeasible score infinity.
    """
    if not sets:
        raise InvalidConfigError("nothing to rank")
    unknown = [m for m in metric_ids if m not in METRICS]
    if unknown or not metric_ids:
        raise InvalidConfigError(f"unknown metric ids {unknown}; choose from {METRICS}")
    scenario = scenario if scenario is not None else reference_scenario()
    config = candidate_config if candidate_config is not None else reference_candidate_config()
    candidates = generate_candidates(scenario.frame, start, config)
    previous = previous if previous is not None else previous_for(scenario, start, config)
    ctx = EvaluationContext(scenario=scenario, previous_trajectory=previous)

    raw = []
    for item in sets:
        cost = item if isinstance(item, (CostSpec, NamedCost)) else CostSpec.from_weights(item)
        raw.append(_select_row(0.0, cost, candidates, ctx))

    feasible = [r for r in raw if r.feasible]
    bounds = {m: (min(r.metric(m) for r in feasible), max(r.metric(m) for r in feasible)) if feasible else (0, 0)
              for m in metric_ids}
    scored = []
    for i, row in enumerate(raw):
        metrics = {m: row.metric(m) for m in metric_ids}
        if not row.feasible:
            scored.append((math.inf, i, metrics, {m: math.nan for m in metric_ids}))
            continue
        norm = {}
        for m in metric_ids:
            lo, hi = bounds[m]
            x = (row.metric(m) - lo) / (hi - lo) if hi > lo else 0.0
            norm[m] = 1.0 - x if HIGHER_IS_BETTER[m] and hi > lo else x
        scored.append((sum(norm[m] for m in metric_ids), i, metrics, norm))
    labels = [_label(item) for item in sets]
    first = {}
    for i, label in enumerate(labels):
        first.setdefault(label, i)
    scored.sort(key=lambda e: (e[0], first[labels[e[1]]], e[1]))
    return [RankEntry(rank + 1, i, labels[i], score, metrics, norm)
            for rank, (score, i, metrics, norm) in enumerate(scored)]


def ranking_table(entries: Sequence[RankEntry], metric_ids: Sequence[str]) -> str:
    header = ["rank", "set_index", "label", "score"] + list(metric_ids) + [f"{m}_normalized" for m in metric_ids]
    buf = io.StringIO()
    buf.write(f"# ranking_score: {RANKING_SCORE}\n")
    buf.write(",".join(header) + "\n")
    for e in entries:
        cells = [str(e.rank), str(e.set_index), '"' + e.label + '"', _fmt(e.score)]
        cells += [_fmt(e.metrics[m]) for m in metric_ids] + [_fmt(e.normalized[m]) for m in metric_ids]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
