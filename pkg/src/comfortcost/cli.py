"""Command-line interface: ``comfortcost {evaluate,select,sweep,rank,catalog}``.

Exit codes: 0 success, 2 usage, 3 parse, 4 infeasible / no feasible candidate,
5 missing context.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import CATALOG, DuWeightConfig, evaluate_cost, resolve_cost
from .costs import EvaluationContext, FuelModel
from .dsl import CostSpec, format_cost_expr
from .errors import (CatalogLookupError, ComfortCostError, CostExprError, InvalidInputError,
                     MissingContextError, NoFeasibleCandidateError, UnknownPartialError)
from .experiment import (DEFAULT_GRID, METRICS, REFERENCE_START, SweepConfig, rank_weight_sets,
                         reference_candidate_config, reference_scenario, ranking_table, run_sweep,
                         sweep_table)
from .frenet import CandidateConfig, generate_candidates
from .io import FileFormatError, load_scenario, load_trajectory, write_trajectory
from .selection import ResponseRatioConfig, check_constraints, select_best

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_CONTEXT = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _floats(text: str, what: str, n=None) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{what}: empty list")
    if n is not None and len(values) not in (n if isinstance(n, tuple) else (n,)):
        raise UsageError(f"{what}: expected {n} values, got {len(values)}")
    return values


def _weights(text: str) -> dict:
    """``"LC=0.17,D=0.2"`` -> ``{"LC": 0.17, "D": 0.2}`` with canonical ids."""
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"weights: expected ID=VALUE, got {part!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"weights: {key.strip()}: not a number: {value!r}") from None
    if not out:
        raise UsageError("weights: empty")
    try:
        return dict(CostSpec.from_weights(out).terms)
    except UnknownPartialError as exc:
        raise UsageError(f"weights: {exc}") from None


def _add_context_flags(p):
    p.add_argument("--previous", help="previous trajectory CSV (consistency cost C)")
    p.add_argument("--fuel", metavar="ETA[,H,RHO]", help="fuel model for the energy cost E")
    p.add_argument("--response", metavar="T,MAX_RATIO", help="response-ratio constraint")
    p.add_argument("--a-max", type=float, help="kinematic bound on |a| [m/s^2]")
    p.add_argument("--delta-max", type=float, help="kinematic bound on |delta| [rad]")
    p.add_argument("--du", metavar="A_MAX,V_MAX[,W4,W5,W6,W7]", help="Du conditional-weight config for @XD1")


def _add_candidate_flags(p, defaults: CandidateConfig, start):
    p.add_argument("--offsets", default=",".join(repr(o) for o in defaults.lateral_offsets),
                   help="comma-separated terminal lateral offsets [m] (use --offsets=-1,0,1)")
    p.add_argument("--horizon", type=float, default=defaults.horizon)
    p.add_argument("--speed", type=float, default=defaults.speed)
    p.add_argument("--ds", type=float, default=defaults.sample_spacing)
    p.add_argument("--start", default=",".join(repr(float(v)) for v in start), metavar="S0,D0,HEADING_ERR")


def _candidate_config(args) -> CandidateConfig:
    return CandidateConfig(tuple(_floats(args.offsets, "--offsets")), args.horizon, args.speed, args.ds)


def _context(args, scenario, force=None) -> EvaluationContext:
    previous = load_trajectory(args.previous)[0] if args.previous else None
    fuel = None
    if args.fuel:
        vals = _floats(args.fuel, "--fuel", (1, 3))
        fuel = FuelModel(*vals)
    rc = ResponseRatioConfig(*_floats(args.response, "--response", 2)) if args.response else None
    du = None
    if args.du:
        vals = _floats(args.du, "--du", (2, 6))
        du = DuWeightConfig(*vals)
    return EvaluationContext(scenario=scenario, previous_trajectory=previous, fuel_model=fuel,
                             traction_force=force, du_config=du, response_config=rc)


def _print_json(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _leader(ctx, traj):
    try:
        return ctx.leading_for(traj)
    except MissingContextError:
        return None


def cmd_evaluate(args, out) -> int:
    scenario = load_scenario(args.scenario)
    traj, force = load_trajectory(args.trajectory)
    cost = resolve_cost(args.cost)
    ctx = _context(args, scenario, force)
    breakdown = evaluate_cost(cost, traj, ctx)
    report = check_constraints(traj, scenario, ctx.response_config, args.a_max, args.delta_max,
                               _leader(ctx, traj))
    _print_json({"cost": args.cost, **breakdown.as_dict(), "feasibility": report.as_dict()}, out)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_select(args, out) -> int:
    scenario = load_scenario(args.scenario)
    cost = resolve_cost(args.cost)
    cfg = _candidate_config(args)
    start = _floats(args.start, "--start", 3)
    ctx = _context(args, scenario)
    candidates = generate_candidates(scenario.frame, start, cfg)
    sel = select_best(candidates, cost, ctx, scenario, args.a_max, args.delta_max)
    if args.output:
        write_trajectory(candidates[sel.index], args.output)
    _print_json({"cost": args.cost, "index": sel.index, "offset": cfg.lateral_offsets[sel.index],
                 **sel.breakdown.as_dict(), "candidate_costs": list(sel.costs),
                 "output": args.output}, out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    scenario = load_scenario(args.scenario) if args.scenario else reference_scenario()
    if args.grid:
        grid = tuple(_floats(args.grid, "--grid"))
    elif args.grid_points is not None:
        if args.grid_points < 1:
            raise UsageError("--grid-points must be at least 1")
        n = args.grid_points
        grid = (0.0,) if n == 1 else tuple(round(i / (n - 1), 12) for i in range(n))
    else:
        grid = DEFAULT_GRID
    weights = _weights(args.base_weights)
    try:
        cfg = SweepConfig(weights, args.swept, grid, scenario, _candidate_config(args),
                          tuple(_floats(args.start, "--start", 3)),
                          load_trajectory(args.previous)[0] if args.previous else None)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    table = sweep_table(cfg, run_sweep(cfg))
    _emit(table, args.output, out)
    return EXIT_OK


def cmd_rank(args, out) -> int:
    scenario = load_scenario(args.scenario) if args.scenario else reference_scenario()
    sets = []
    for text in args.set:
        if text.startswith("@") or text.lstrip().startswith("["):
            sets.append(resolve_cost(text))
        else:
            sets.append(_weights(text))
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = [m for m in metrics if m not in METRICS]
    if bad or not metrics:
        raise UsageError(f"--metrics: unknown {bad}; choose from {', '.join(METRICS)}")
    entries = rank_weight_sets(sets, metrics, scenario, _candidate_config(args),
                               tuple(_floats(args.start, "--start", 3)),
                               load_trajectory(args.previous)[0] if args.previous else None)
    _emit(ranking_table(entries, metrics), args.output, out)
    return EXIT_OK


def cmd_catalog(args, out) -> int:
    for name, nc in CATALOG.items():
        extra = " + conditional terms" if nc.extra is not None else ""
        out.write(f"@{name}\t{format_cost_expr(nc.spec)}{extra}\t{nc.description}\n")
    return EXIT_OK


def _emit(text, path, out):
    if path:
        Path(path).write_text(text)
    else:
        out.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="comfortcost", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    ref_cfg = reference_candidate_config()

    p = sub.add_parser("evaluate", help="evaluate one trajectory against a cost expression")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--cost", required=True, help='DSL string like "[(A|1),(J|1)]" or "@NAME"')
    _add_context_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("select", help="generate Frenet candidates and pick the cheapest feasible one")
    p.add_argument("--scenario", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--output", help="write the winning trajectory CSV here")
    _add_candidate_flags(p, CandidateConfig((-1.0, 0.0, 1.0), 20.0, 5.0, 1.0), (0.0, 0.0, 0.0))
    _add_context_flags(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("sweep", help="vary one weight over [0, 1] and tabulate the winner's metrics")
    p.add_argument("--scenario", help="scenario JSON (default: built-in reference scenario)")
    p.add_argument("--base-weights", default="LC=0.17,D=0.2,C=0.02,L=0.7,K=0.01")
    p.add_argument("--swept", default="LC")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--grid", help="explicit comma-separated weight values")
    g.add_argument("--grid-points", type=int, help="evenly spaced points on [0, 1] (default 11)")
    p.add_argument("--output")
    p.add_argument("--previous")
    _add_candidate_flags(p, ref_cfg, REFERENCE_START)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rank", help="rank weight sets by the metrics of the trajectories they select")
    p.add_argument("--scenario")
    p.add_argument("--set", action="append", required=True,
                   help='"@RA1", a DSL string, or "LC=0.17,D=0.2,..."; repeat per set')
    p.add_argument("--metrics", default=",".join(METRICS))
    p.add_argument("--output")
    p.add_argument("--previous")
    _add_candidate_flags(p, ref_cfg, REFERENCE_START)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("catalog", help="list the named cost functions")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except (FileFormatError, CostExprError, CatalogLookupError, UnknownPartialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MissingContextError as exc:
        print(f"error: missing context for {', '.join(exc.cost_ids)}: {exc}", file=sys.stderr)
        return EXIT_CONTEXT
    except NoFeasibleCandidateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for i, rep in enumerate(exc.reports):
            print(f"  candidate {i}: {', '.join(rep.names())}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ComfortCostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
