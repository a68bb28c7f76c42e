"""Scenario (JSON) and trajectory (CSV) files."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ComfortCostError, InvalidInputError
from .geometry import ConvexPolygon, Disc, ObstacleSet
from .scenario import WEI_D_L_MIN, WEI_K_GAIN, WEI_T_RESPONSE, LeadingVehicleTrace, Profile, Scenario
from .trajectory import FIELDS, BasePath, Trajectory, derive_kinematics

KINEMATIC_COLUMNS = FIELDS[3:]
FORCE_COLUMN = "force"


class FileFormatError(ComfortCostError):
    """Malformed input file. ``where`` is a field path or ``line N``."""

    def __init__(self, path, where, reason):
        self.path = str(path)
        self.where = where
        self.reason = reason
        super().__init__(f"{self.path}: {where}: {reason}")


class _Reader:
    def __init__(self, path):
        self.path = path

    def fail(self, where, reason):
        raise FileFormatError(self.path, where, reason)

    def get(self, obj, key, where, required=True, default=None):
        if not isinstance(obj, dict):
            self.fail(where, "expected an object")
        if key not in obj:
            if required:
                self.fail(f"{where}.{key}" if where else key, "missing required field")
            return default
        return obj[key]

    def number(self, value, where, positive=False, nonneg=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(where, f"expected a finite number, got {value!r}")
        if positive and not value > 0:
            self.fail(where, f"must be positive, got {value}")
        if nonneg and value < 0:
            self.fail(where, f"must be non-negative, got {value}")
        return float(value)

    def numbers(self, value, where, min_len=1):
        if not isinstance(value, list) or len(value) < min_len:
            self.fail(where, f"expected a list of at least {min_len} numbers")
        return [self.number(v, f"{where}[{i}]") for i, v in enumerate(value)]

    def points(self, value, where, min_len):
        if not isinstance(value, list) or len(value) < min_len:
            self.fail(where, f"expected a list of at least {min_len} [x, y] points")
        out = []
        for i, p in enumerate(value):
            if not isinstance(p, list) or len(p) != 2:
                self.fail(f"{where}[{i}]", "expected an [x, y] pair")
            out.append(self.numbers(p, f"{where}[{i}]"))
        return out

    def shape(self, obj, where):
        kind = self.get(obj, "type", where)
        try:
            if kind == "disc":
                center = self.points([self.get(obj, "center", where)], f"{where}.center", 1)[0]
                return Disc(tuple(center), self.number(self.get(obj, "radius", where), f"{where}.radius",
                                                       positive=True))
            if kind == "polygon":
                return ConvexPolygon(self.points(self.get(obj, "vertices", where), f"{where}.vertices", 3))
        except InvalidInputError as exc:
            self.fail(where, str(exc))
        self.fail(f"{where}.type", f"unknown shape type {kind!r} (expected 'disc' or 'polygon')")

    def profile(self, obj, where):
        s = self.numbers(self.get(obj, "s", where), f"{where}.s")
        value = self.numbers(self.get(obj, "value", where), f"{where}.value")
        try:
            return Profile(s, value)
        except InvalidInputError as exc:
            self.fail(where, str(exc))


def scenario_from_dict(doc: dict, path="<scenario>") -> Scenario:
    r = _Reader(path)
    if not isinstance(doc, dict):
        r.fail("<root>", "expected a JSON object")
    try:
        base = BasePath(r.points(r.get(doc, "base_path", ""), "base_path", 2))
    except InvalidInputError as exc:
        r.fail("base_path", str(exc))
    speed_limit = r.number(r.get(doc, "speed_limit", ""), "speed_limit", positive=True)

    obstacles = ObstacleSet()
    ob = r.get(doc, "obstacles", "", required=False)
    if ob is not None:
        items = r.get(ob, "items", "obstacles")
        if not isinstance(items, list):
            r.fail("obstacles.items", "expected a list")
        shapes = [r.shape(item, f"obstacles.items[{i}]") for i, item in enumerate(items)]
        d_inf = r.number(r.get(ob, "d_influence", "obstacles"), "obstacles.d_influence", positive=True)
        obstacles = ObstacleSet(tuple(shapes), d_inf)

    goal_region, window = None, None
    goal = r.get(doc, "goal", "", required=False)
    if goal is not None:
        goal_region = r.shape(goal, "goal")
        tw = r.get(goal, "time_window", "goal", required=False)
        if tw is not None:
            lo, hi = r.numbers(tw, "goal.time_window", 2)[:2]
            if lo > hi:
                r.fail("goal.time_window", "start must not exceed end")
            window = (lo, hi)

    v_des = theta_des = None
    profiles = r.get(doc, "profiles", "", required=False)
    if profiles is not None:
        if "v_des" in profiles:
            v_des = r.profile(profiles["v_des"], "profiles.v_des")
        if "theta_des" in profiles:
            theta_des = r.profile(profiles["theta_des"], "profiles.theta_des")

    leader = None
    lv = r.get(doc, "leading_vehicle", "", required=False)
    if lv is not None:
        trace = r.get(lv, "trace", "leading_vehicle")
        t = r.numbers(r.get(trace, "t", "leading_vehicle.trace"), "leading_vehicle.trace.t")
        s = r.numbers(r.get(trace, "s", "leading_vehicle.trace"), "leading_vehicle.trace.s")
        v = r.numbers(r.get(trace, "v", "leading_vehicle.trace"), "leading_vehicle.trace.v")
        try:
            leader = LeadingVehicleTrace(
                t, s, v,
                a_maxdec=r.number(r.get(lv, "a_maxdec", "leading_vehicle"), "leading_vehicle.a_maxdec",
                                  positive=True),
                d_l_min=r.number(lv.get("d_l_min", WEI_D_L_MIN), "leading_vehicle.d_l_min", nonneg=True),
                k_gain=r.number(lv.get("k_gain", WEI_K_GAIN), "leading_vehicle.k_gain", nonneg=True),
                T_response=r.number(lv.get("T_response", WEI_T_RESPONSE), "leading_vehicle.T_response",
                                    nonneg=True),
            )
        except InvalidInputError as exc:
            r.fail("leading_vehicle.trace", str(exc))

    ego_radius = r.number(doc.get("ego_radius", 1.0), "ego_radius", nonneg=True)
    frame_spacing = r.number(doc.get("frame_spacing", 0.5), "frame_spacing", positive=True)
    return Scenario(base, speed_limit, obstacles, goal_region, window, v_des, theta_des, leader,
                    ego_radius, frame_spacing)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    except OSError as exc:
        raise FileFormatError(path, "<file>", str(exc)) from None
    return scenario_from_dict(doc, path)


def _shape_dict(shape) -> dict:
    if isinstance(shape, Disc):
        return {"type": "disc", "center": list(shape.center), "radius": shape.radius}
    return {"type": "polygon", "vertices": shape.vertices.tolist()}


def scenario_to_dict(scenario: Scenario) -> dict:
    doc: dict[str, Any] = {
        "base_path": scenario.base_path.vertices.tolist(),
        "speed_limit": scenario.speed_limit,
        "ego_radius": scenario.ego_radius,
        "frame_spacing": scenario.frame_spacing,
        "obstacles": {"d_influence": scenario.obstacles.d_influence,
                      "items": [_shape_dict(o) for o in scenario.obstacles.obstacles]},
    }
    if scenario.goal_region is not None:
        doc["goal"] = _shape_dict(scenario.goal_region)
        if scenario.goal_time_window is not None:
            doc["goal"]["time_window"] = list(scenario.goal_time_window)
    profiles = {}
    for name in ("v_des", "theta_des"):
        prof = getattr(scenario, name)
        if prof is not None:
            profiles[name] = {"s": prof.s.tolist(), "value": prof.value.tolist()}
    if profiles:
        doc["profiles"] = profiles
    lv = scenario.leading_vehicle
    if lv is not None:
        doc["leading_vehicle"] = {
            "trace": {"t": lv.t.tolist(), "s": lv.s.tolist(), "v": lv.v.tolist()},
            "a_maxdec": lv.a_maxdec, "d_l_min": lv.d_l_min, "k_gain": lv.k_gain, "T_response": lv.T_response,
        }
    return doc


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_trajectory(path) -> tuple[Trajectory, Optional[np.ndarray]]:
    """Read a trajectory CSV; returns the trajectory and the optional force column.

    ``t, x, y`` are required. When any kinematic column is missing, all of them
    are recomputed from positions (steering columns are kept if present).
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise FileFormatError(path, "<file>", str(exc)) from None
    if not rows:
        raise FileFormatError(path, "line 1", "empty file")
    header = [h.strip() for h in rows[0]]
    for col in ("t", "x", "y"):
        if col not in header:
            raise FileFormatError(path, "header", f"missing required column {col!r}")
    unknown = [h for h in header if h not in FIELDS and h != FORCE_COLUMN]
    if unknown:
        raise FileFormatError(path, "header", f"unknown columns {unknown}")
    data = {h: [] for h in header}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FileFormatError(path, f"line {lineno}", f"expected {len(header)} fields, got {len(row)}")
        for h, cell in zip(header, row):
            try:
                value = float(cell)
            except ValueError:
                raise FileFormatError(path, f"line {lineno}", f"column {h!r}: not a number: {cell!r}") from None
            if not math.isfinite(value):
                raise FileFormatError(path, f"line {lineno}", f"column {h!r}: non-finite value")
            data[h].append(value)
    cols = {h: np.array(v) for h, v in data.items()}
    force = cols.pop(FORCE_COLUMN, None)
    try:
        if all(c in cols for c in KINEMATIC_COLUMNS):
            traj = Trajectory(**cols)
        else:
            traj = derive_kinematics(cols["t"], cols["x"], cols["y"], cols.get("delta"), cols.get("delta_rate"))
    except InvalidInputError as exc:
        raise FileFormatError(path, "data", str(exc)) from None
    return traj, force


def write_trajectory(trajectory: Trajectory, path, force=None) -> None:
    """Write all state columns with round-trip float precision."""
    header = list(FIELDS) + ([FORCE_COLUMN] if force is not None else [])
    cols = [getattr(trajectory, f) for f in FIELDS]
    if force is not None:
        cols.append(np.asarray(force, dtype=float))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])
