"""Acceptance criteria, one test per criterion, at the stated tolerances."""
import time

import numpy as np
import pytest

from comfortcost.catalog import CATALOG, DuWeightConfig, du_condition1, du_condition1_mask, du_time_weights
from comfortcost.cli import main
from comfortcost.costs import (REGISTRY, EvaluationContext, FuelModel, LeadingVehicleContext, gap_cost,
                               max_curvature_cost, partial_cost, running_cost)
from comfortcost.dsl import CostSpec, evaluate, format_cost_expr, parse_cost_expr
from comfortcost.errors import NoFeasibleCandidateError
from comfortcost.experiment import SweepConfig, run_sweep
from comfortcost.frenet import CandidateConfig, build_frenet_frame, from_frenet, generate_candidates, to_frenet
from comfortcost.geometry import ConvexPolygon, Disc, ObstacleSet
from comfortcost.scenario import (WEI_D_L_MIN, WEI_K_GAIN, WEI_T_RESPONSE, LeadingVehicleTrace, Profile,
                                  Scenario)
from comfortcost.selection import check_constraints, select_best
from comfortcost.trajectory import BasePath, StateSample, derive_kinematics

from conftest import circle_traj, const_traj, straight_scenario

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def arc_path(R, angle, n):
    phi = np.linspace(0.0, angle, n)
    return BasePath(np.column_stack([R * np.sin(phi), R * (1.0 - np.cos(phi))]))


# ---------------------------------------------------------------- criterion 1

def _identity_cases():
    """(id, scenario, context extras, zero trajectory, constant trajectory, closed form)."""
    plain = straight_scenario()
    T = 4.0
    wall = ObstacleSet((ConvexPolygon([[-100.0, 5.0], [200.0, 5.0], [200.0, 6.0], [-100.0, 6.0]]),), 3.0)
    goal = straight_scenario(goal_region=Disc((80.0, 0.0), 2.0))
    fuel = FuelModel(0.5)
    return [
        ("A", plain, {}, const_traj(a=0.0), const_traj(a=1.5), 1.5**2 * T),
        ("J", plain, {}, const_traj(jerk=0.0), const_traj(jerk=0.5), 0.25 * T),
        ("SA", plain, {}, const_traj(delta=0.0), const_traj(delta=0.2), 0.2**2 * T),
        ("SR", plain, {}, const_traj(delta_rate=0.0), const_traj(delta_rate=0.3), 0.3**2 * T),
        ("E", plain, {"fuel_model": fuel, "zero_force": 0.0, "force": 1.0},
         const_traj(v=1.0), const_traj(v=1.0), (1.0 * 1.0 / 0.5) ** 2 * T),
        ("Y", plain, {}, const_traj(yaw_rate=0.0), const_traj(yaw_rate=0.25), 0.0625 * T),
        ("LC", plain, {}, const_traj(y=0.0), const_traj(y=1.5), 2.25 * T),
        ("V", straight_scenario(v_des=Profile.constant(8.0)), {}, const_traj(v=8.0), const_traj(v=10.0), 4.0 * T),
        ("O", plain, {}, const_traj(theta=0.0), const_traj(theta=0.25), 0.0625 * T),
        ("D", straight_scenario(obstacles=wall), {}, const_traj(y=0.0), const_traj(y=3.5), 0.5 * T),
        ("L", plain, {}, const_traj(v=0.0), const_traj(v=3.0), 3.0 * T),
        ("T", plain, {}, const_traj(t0=-T, tf=0.0), const_traj(), T),
        ("TO", plain, {}, const_traj(y=np.r_[np.ones(20), 0.0]), const_traj(y=np.r_[np.zeros(20), 1.5]), 2.25),
        ("TG", goal, {}, const_traj(x=np.linspace(70.0, 80.0, 21), y=0.5),
         const_traj(x=np.linspace(70.0, 80.0, 21), y=5.0), 9.0),
    ]


def test_c1_partial_identity_suite():
    cases = _identity_cases()
    assert sorted(c[0] for c in cases) == sorted(("A", "J", "SA", "SR", "E", "Y", "LC", "V", "O", "D", "L",
                                                  "T", "TO", "TG"))
    with Timer() as timer:
        for cid, scenario, extra, zero, const, expected in cases:
            fuel = extra.get("fuel_model")
            zctx = EvaluationContext(scenario=scenario, fuel_model=fuel,
                                     traction_force=np.full(len(zero), extra.get("zero_force", 0.0)))
            cctx = EvaluationContext(scenario=scenario, fuel_model=fuel,
                                     traction_force=np.full(len(const), extra.get("force", 0.0)))
            assert abs(partial_cost(cid, zero, zctx)) <= 1e-12, cid
            assert partial_cost(cid, const, cctx) == pytest.approx(expected, abs=1e-12, rel=0), cid
    assert timer.elapsed < 1.0


# ---------------------------------------------------------------- criterion 2

def _random_weight(rng):
    kind = rng.integers(6)
    if kind == 0:
        return float(rng.integers(-100, 1000))
    if kind == 1:
        return float(rng.uniform(0, 1))
    if kind == 2:
        return float(np.round(rng.uniform(0, 10), int(rng.integers(0, 4))))
    if kind == 3:
        return float(rng.uniform(-1, 1) * 10.0 ** rng.integers(-30, 30))
    if kind == 4:
        return 0.0
    return float(rng.standard_normal() * 1e17)


def test_c2_dsl_round_trip():
    rng = np.random.default_rng(2)
    ids = list(REGISTRY) + ["κ"]
    specs = []
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        specs.append(CostSpec(tuple((ids[int(rng.integers(len(ids)))], _random_weight(rng)) for _ in range(n))))
    with Timer() as timer:
        for spec in specs:
            assert parse_cost_expr(format_cost_expr(spec)) == spec
        assert CATALOG["JW1"].spec.terms == (("LV", 50.0), ("A", 10.0), ("BD", 30.0), ("D", 20.0))
        assert CATALOG["KC1"].spec.weights == (0.1, 0.01, 0.02)
        assert CATALOG["RA1"].spec.weights == (0.2, 0.2, 0.17, 0.01, 0.02)
        assert CATALOG["RA1"].spec.ids == ("D", "L", "LC", "K", "C")
    assert timer.elapsed < 1.0


# ---------------------------------------------------------------- criterion 3

def _linearity_scenario():
    trace = LeadingVehicleTrace(t=[0.0, 100.0], s=[60.0, 1060.0], v=[10.0, 10.0], a_maxdec=6.0)
    return Scenario(
        base_path=arc_path(300.0, 0.6, 60), speed_limit=30.0,
        obstacles=ObstacleSet((Disc((40.0, 4.0), 1.0), ConvexPolygon([[70, -6], [74, -6], [74, -3], [70, -3]])), 4.0),
        goal_region=Disc((120.0, 25.0), 5.0), v_des=Profile([0.0, 200.0], [8.0, 12.0]), leading_vehicle=trace,
    )


def _random_trajectory(rng, frame):
    n = int(rng.integers(20, 80))
    duration = rng.uniform(3.0, 8.0)
    t = np.linspace(0.0, duration, n) + rng.uniform(0, 2)
    v0 = rng.uniform(4.0, 12.0)
    s = rng.uniform(0.0, 20.0) + v0 * (t - t[0]) + rng.uniform(-0.3, 0.3) * (t - t[0]) ** 2
    d = rng.uniform(-3, 3) + rng.uniform(-1, 1) * np.sin(rng.uniform(0.2, 1.5) * (t - t[0]))
    xy = from_frenet(frame, np.clip(s, 0, frame.length), d)
    x, y = xy[:, 0], xy[:, 1]
    return derive_kinematics(t, x, y, delta=rng.uniform(-0.2, 0.2, n), delta_rate=rng.uniform(-0.1, 0.1, n))


def test_c3_linearity_oracle():
    rng = np.random.default_rng(3)
    scenario = _linearity_scenario()
    frame = scenario.frame
    previous = _random_trajectory(rng, frame)
    for _ in range(100):
        traj = _random_trajectory(rng, frame)
        ctx = EvaluationContext(scenario=scenario, previous_trajectory=previous, fuel_model=FuelModel(0.3),
                                traction_force=rng.uniform(100, 2000, len(traj)))
        ids = rng.choice(REGISTRY, size=int(rng.integers(1, len(REGISTRY) + 1)), replace=False)
        spec = CostSpec(tuple((str(i), float(rng.uniform(0.01, 50.0))) for i in ids))
        total = evaluate(spec, traj, ctx).total
        oracle = 0.0
        for cid, w in spec.terms:
            oracle += w * partial_cost(cid, traj, ctx)
        assert abs(total - oracle) <= 1e-12 * abs(oracle)
        for c in (0.5, 2.0, 10.0):
            scaled = evaluate(spec.scaled(c), traj, ctx).total
            assert abs(scaled - c * total) <= 1e-12 * abs(c * total)


# ---------------------------------------------------------------- criterion 4

@pytest.mark.parametrize("R", [5.0, 10.0, 50.0])
def test_c4_curvature_oracle(R):
    for n in (200, 400):
        assert abs(max_curvature_cost(circle_traj(R, n=n)) - 1.0 / R) <= 0.01 / R
    rng = np.random.default_rng(int(R))
    for _ in range(10):
        heading = rng.uniform(-np.pi, np.pi)
        t = np.linspace(0.0, 10.0, 200)
        traj = derive_kinematics(t, rng.uniform(-50, 50) + 3 * t * np.cos(heading),
                                 rng.uniform(-50, 50) + 3 * t * np.sin(heading))
        assert max_curvature_cost(traj) <= 1e-9


# ---------------------------------------------------------------- criterion 5

def test_c5_frenet_round_trip():
    frame = build_frenet_frame(arc_path(30.0, np.pi / 2, 91), 0.5)
    rng = np.random.default_rng(5)
    s = rng.uniform(0.0, frame.length, 500)
    d = rng.uniform(-5.0, 5.0, 500)
    worst = 0.0
    for si, di in zip(s, d):
        x, y = from_frenet(frame, si, di)
        s2, d2 = to_frenet(frame, (x, y))
        worst = max(worst, float(np.hypot(s2 - si, d2 - di)))
    assert worst <= 1e-6


# ---------------------------------------------------------------- criterion 6

SELECT_IDS = ("LC", "D", "K", "C", "A", "J", "Y", "L", "O", "T", "TO", "SA")


def _random_selection_case(rng):
    if rng.random() < 0.5:
        base = BasePath([[0.0, 0.0], [120.0, 0.0]])
    else:
        base = arc_path(rng.uniform(60, 200), 1.0, 40)
    discs = tuple(Disc((rng.uniform(20, 60), rng.uniform(-4, 4)), rng.uniform(0.2, 1.5))
                  for _ in range(int(rng.integers(0, 4))))
    scenario = Scenario(base, speed_limit=rng.uniform(4.0, 20.0), obstacles=ObstacleSet(discs, 3.0))
    k = int(rng.integers(1, 26))
    offsets = tuple(float(o) for o in np.sort(rng.uniform(-4, 4, k)))
    if rng.random() < 0.3:
        offsets = tuple(float(o) for o in np.linspace(-3, 3, k))  # symmetric sets produce exact ties
    cfg = CandidateConfig(offsets, horizon=rng.uniform(15, 40), speed=rng.uniform(3, 12), sample_spacing=1.0)
    start = (rng.uniform(0, 20), rng.uniform(-1, 1), rng.uniform(-0.1, 0.1))
    candidates = generate_candidates(scenario.frame, start, cfg)
    previous = generate_candidates(scenario.frame, (start[0], start[1], 0.0),
                                   CandidateConfig((start[1],), cfg.horizon, cfg.speed, 1.0))[0]
    ids = rng.choice(SELECT_IDS, size=int(rng.integers(1, 5)), replace=False)
    spec = CostSpec(tuple((str(i), float(rng.uniform(0.01, 5))) for i in ids))
    return scenario, candidates, spec, EvaluationContext(scenario=scenario, previous_trajectory=previous)


def _brute_force(candidates, spec, ctx, scenario):
    best = None
    for i, traj in enumerate(candidates):
        if not check_constraints(traj, scenario).feasible:
            continue
        total = 0.0
        for cid, w in spec.terms:
            total += w * partial_cost(cid, traj, ctx)
        if best is None or total < best[0]:
            best = (total, i)
    return best


def test_c6_selector_brute_force():
    rng = np.random.default_rng(6)
    cases = [_random_selection_case(rng) for _ in range(50)]
    infeasible = 0
    with Timer() as timer:
        for scenario, candidates, spec, ctx in cases:
            assert len(candidates) <= 25
            expected = _brute_force(candidates, spec, ctx, scenario)
            if expected is None:
                infeasible += 1
                with pytest.raises(NoFeasibleCandidateError):
                    select_best(candidates, spec, ctx)
                continue
            sel = select_best(candidates, spec, ctx)
            assert (sel.total, sel.index) == expected
            for c in (0.5, 3.7, 10.0, 1e3):
                assert select_best(candidates, spec.scaled(c), ctx).index == sel.index
    assert infeasible < len(cases)
    assert timer.elapsed < 5.0


# ---------------------------------------------------------------- criterion 7

def test_c7_wei_constants():
    assert (WEI_D_L_MIN, WEI_K_GAIN, WEI_T_RESPONSE) == (5.0, 1.14, 0.6)
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(10, 200))
        t = np.sort(rng.uniform(0, 30, n))
        t = np.unique(t)
        v = rng.uniform(0, 30, len(t))
        traj = const_traj(n=len(t), v=v).replace(t=t)
        lv = LeadingVehicleContext(d_l=5.0 + 1.14 * v, v_l=v, a_maxdec=8.0)
        assert lv.T_response == 0.6
        assert abs(gap_cost(traj, lv)) <= 1e-12
        assert abs(running_cost("LV", traj, EvaluationContext(leading_vehicle=lv))) <= 1e-12
        for eps in (0.1, -0.5, 2.0):
            lv_eps = LeadingVehicleContext(d_l=5.0 + 1.14 * v + eps, v_l=v, a_maxdec=8.0)
            assert abs(gap_cost(traj, lv_eps) - eps**2 * (traj.tf - traj.t0)) <= 1e-9


# ---------------------------------------------------------------- criterion 8

def test_c8_du_condition1_truth_table():
    cfg = DuWeightConfig(a_max=2.0, v_max=15.0)
    rows = 0
    for forward in (True, False):
        for hard in (True, False):
            for off in (True, False):
                for misaligned in (True, False):
                    a_tan = 0.5 if forward else -0.5
                    a = 3.0 if hard else 1.0
                    d = 0.5 if off else 0.1
                    theta_err = 0.2 if misaligned else 0.01
                    expected = forward and (hard or off or misaligned)
                    sample = StateSample(0, 0, 0, 1, a, a_tan, 0, 0, 0, 0, 0)
                    assert du_condition1(sample, d, theta_err, cfg) is expected
                    assert bool(du_condition1_mask([a_tan], [a], [d], [theta_err], cfg)[0]) is expected
                    rows += 1
    assert rows == 16

    rng = np.random.default_rng(8)
    scenario = straight_scenario()
    for _ in range(50):
        cfg = DuWeightConfig(a_max=rng.uniform(0.1, 3), v_max=15.0, w6_0=rng.uniform(0.1, 5),
                             w7_0=rng.uniform(0.1, 5))
        n = int(rng.integers(10, 100))
        t = np.linspace(0, rng.uniform(2, 10), n)
        x = rng.uniform(2, 10) * t + rng.uniform(-1, 1) * t**2
        y = rng.uniform(-1, 1) * np.sin(rng.uniform(0.1, 2) * t) + rng.uniform(-0.5, 0.5)
        traj = derive_kinematics(t, x, y)
        _, w6, w7, cond = du_time_weights(traj, EvaluationContext(scenario=scenario), cfg)
        assert np.all((w6 != 0) ^ (w7 != 0))
        assert np.array_equal(w6 != 0, cond)
        assert np.all(w6 + w7 == np.where(cond, cfg.w6_0, cfg.w7_0))


# ---------------------------------------------------------------- criterion 9

def test_c9_sweep_trends():
    with Timer() as timer:
        lc_rows = run_sweep(SweepConfig(swept_id="LC"))
        d_rows = run_sweep(SweepConfig(swept_id="D"))
    assert len(lc_rows) == len(d_rows) == 11
    assert all(r.feasible for r in lc_rows + d_rows)
    lc_under_lc = [r.lane_center_metric for r in lc_rows]
    lc_under_d = [r.lane_center_metric for r in d_rows]
    assert all(b <= a for a, b in zip(lc_under_lc, lc_under_lc[1:])), lc_under_lc
    assert all(b >= a for a, b in zip(lc_under_d, lc_under_d[1:])), lc_under_d
    # both sweeps must actually move the winner, otherwise the trend is vacuous
    assert lc_under_lc[0] > lc_under_lc[-1]
    assert lc_under_d[0] < lc_under_d[-1]
    assert timer.elapsed < 30.0


# ---------------------------------------------------------------- criterion 10

def test_c10_sweep_determinism(tmp_path):
    outputs = []
    for run in range(2):
        path = tmp_path / f"sweep{run}.csv"
        assert main(["sweep", "--swept", "D", "--output", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(outputs[0]) > 0
