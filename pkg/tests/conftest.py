import numpy as np
import pytest

from comfortcost import kernels
from comfortcost.frenet import to_frenet_many
from comfortcost.geometry import ConvexPolygon, Disc, ObstacleSet
from comfortcost.scenario import Scenario
from comfortcost.trajectory import BasePath, Trajectory, derive_kinematics


def straight_scenario(length=100.0, **kw):
    return Scenario(base_path=BasePath([[0.0, 0.0], [length, 0.0]]), speed_limit=kw.pop("speed_limit", 20.0), **kw)


def const_traj(n=21, t0=0.0, tf=4.0, **fields):
    """Trajectory whose named fields are constants (or arrays) on a uniform time grid."""
    t = np.linspace(t0, tf, n)
    cols = {"t": t}
    for name, value in fields.items():
        cols[name] = np.broadcast_to(np.asarray(value, dtype=float), t.shape).copy()
    cols.setdefault("x", np.linspace(0.0, 10.0, n))
    cols.setdefault("y", np.zeros(n))
    return Trajectory(**cols)


def circle_traj(R, n=400, speed=5.0, arc=np.pi):
    t = np.linspace(0.0, R * arc / speed, n)
    phi = speed * t / R
    return derive_kinematics(t, R * np.sin(phi), R * (1.0 - np.cos(phi)))


@pytest.fixture
def straight():
    return straight_scenario()


@pytest.fixture
def box():
    return ConvexPolygon([[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def obstacles():
    return ObstacleSet((Disc((30.0, 2.0), 0.5),), d_influence=3.0)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load cached) jitted kernels before any timed section."""
    t = np.linspace(0.0, 1.0, 5)
    kernels.trapezoid(t, t)
    kernels.curvature(t, t, t * t)
    derive_kinematics(t, t, t * t)
    s = straight_scenario(10.0, obstacles=ObstacleSet((Disc((5.0, 1.0), 0.5),
                                                       ConvexPolygon([[0, 2], [1, 2], [1, 3]]))))
    s.obstacles.clearances(t, t)
    to_frenet_many(s.frame, t, t, extrapolate=True)
    yield


# one PASS/FAIL line per acceptance criterion in the terminal summary
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        prev = _ACCEPTANCE.get(name, "PASS")
        _ACCEPTANCE[name] = "PASS" if report.passed and prev == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[1][1:]) if n.split("_")[1][1:].isdigit() else 99):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
