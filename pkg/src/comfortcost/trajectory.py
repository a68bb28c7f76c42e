"""Trajectory data model, derived kinematics, curvature and arc-length tools."""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DegenerateInputError, InvalidInputError

FIELDS = ("t", "x", "y", "v", "a", "a_tan", "jerk", "theta", "yaw_rate", "delta", "delta_rate")


def wrap_angle(angle):
    """Map angles to (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class StateSample:
    """One time-stamped ego state. Units are SI, angles in radians."""

    t: float
    x: float
    y: float
    v: float = 0.0
    a: float = 0.0
    a_tan: float = 0.0
    jerk: float = 0.0
    theta: float = 0.0
    yaw_rate: float = 0.0
    delta: float = 0.0
    delta_rate: float = 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Column-oriented trajectory: one read-only float array per state field.

    Arrays that are omitted default to zeros. ``theta`` is wrapped to (-pi, pi].
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    a_tan: Optional[np.ndarray] = None
    jerk: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None
    yaw_rate: Optional[np.ndarray] = None
    delta: Optional[np.ndarray] = None
    delta_rate: Optional[np.ndarray] = None
    # projections onto Frenet frames, filled lazily by the cost code
    _frenet: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float).ravel()
        n = t.shape[0]
        if n < 2:
            raise DegenerateInputError(f"a trajectory needs at least 2 samples, got {n}")
        for name in FIELDS:
            value = getattr(self, name)
            arr = np.zeros(n) if value is None else np.array(value, dtype=float).ravel()
            if arr.shape != (n,):
                raise InvalidInputError(f"field {name!r} has {arr.shape[0]} samples, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"field {name!r} contains non-finite values")
            if name == "theta":
                arr = wrap_angle(arr)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(np.diff(self.t) <= 0.0):
            raise InvalidInputError("timestamps must be strictly increasing")
        if np.any(self.v < 0.0):
            raise InvalidInputError("speed must be non-negative")

    def __len__(self):
        return self.t.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in FIELDS)

    __hash__ = None

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def tf(self) -> float:
        return float(self.t[-1])

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def samples(self) -> list[StateSample]:
        cols = [getattr(self, f) for f in FIELDS]
        return [StateSample(*map(float, row)) for row in zip(*cols)]

    def sample(self, i: int) -> StateSample:
        return StateSample(*(float(getattr(self, f)[i]) for f in FIELDS))

    @classmethod
    def from_samples(cls, samples: Sequence[StateSample]) -> "Trajectory":
        return cls(**{f.name: [getattr(s, f.name) for s in samples] for f in fields(StateSample)})

    def replace(self, **changes) -> "Trajectory":
        values = {f: getattr(self, f) for f in FIELDS}
        values.update(changes)
        return Trajectory(**values)


@dataclass(frozen=True, eq=False)
class BasePath:
    """Planar polyline with per-vertex cumulative arc length."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise InvalidInputError("vertices must be an (N, 2) array")
        if verts.shape[0] < 2:
            raise DegenerateInputError(f"a base path needs at least 2 vertices, got {verts.shape[0]}")
        if not np.all(np.isfinite(verts)):
            raise InvalidInputError("vertices must be finite")
        seg = np.hypot(*np.diff(verts, axis=0).T)
        if np.any(seg <= 0.0):
            raise DegenerateInputError("consecutive vertices must be distinct")
        s = np.concatenate([[0.0], np.cumsum(seg)])
        verts.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "cumulative_arclength", s)

    @property
    def length(self) -> float:
        return float(self.cumulative_arclength[-1])

    def __len__(self):
        return self.vertices.shape[0]


def _check_timestamps(t):
    if np.any(np.diff(t) == 0.0):
        raise InvalidInputError("repeated timestamps")
    if np.any(np.diff(t) < 0.0):
        raise InvalidInputError("timestamps must be strictly increasing")


def derive_kinematics(t, x, y, delta=None, delta_rate=None) -> Trajectory:
    """Build a :class:`Trajectory` from timestamped positions.

    Velocities and accelerations come from finite differences (central inside,
    second-order one-sided at the ends). ``a`` is the magnitude of the planar
    acceleration and ``a_tan`` its projection on the heading; ``jerk`` is the
    time derivative of ``a``. Steering fields are zero unless given.
    """
    t = np.asarray(t, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if not (t.shape == x.shape == y.shape):
        raise InvalidInputError("t, x and y must have the same length")
    if t.shape[0] < 4:
        raise DegenerateInputError(f"derive_kinematics needs at least 4 points, got {t.shape[0]}")
    _check_timestamps(t)

    vx = np.gradient(x, t, edge_order=2)
    vy = np.gradient(y, t, edge_order=2)
    v = np.hypot(vx, vy)
    ax = np.gradient(vx, t, edge_order=2)
    ay = np.gradient(vy, t, edge_order=2)
    a = np.hypot(ax, ay)
    theta = np.arctan2(vy, vx)
    a_tan = ax * np.cos(theta) + ay * np.sin(theta)
    jerk = np.gradient(a, t, edge_order=2)
    yaw_rate = np.gradient(np.unwrap(theta), t, edge_order=2)
    return Trajectory(
        t=t, x=x, y=y, v=v, a=a, a_tan=a_tan, jerk=jerk, theta=theta, yaw_rate=yaw_rate,
        delta=delta, delta_rate=delta_rate,
    )


def pointwise_curvature(trajectory: Trajectory) -> np.ndarray:
    """Signed curvature at every sample, from time-parameterised derivatives.

    Endpoints copy the neighbouring interior value. Positive is a left turn.
    """
    if len(trajectory) < 3:
        raise DegenerateInputError("curvature needs at least 3 samples")
    seg = np.hypot(np.diff(trajectory.x), np.diff(trajectory.y))
    if np.any(seg == 0.0):
        raise InvalidInputError("coincident consecutive points")
    kappa = kernels.curvature(trajectory.t, trajectory.x, trajectory.y)
    if not np.all(np.isfinite(kappa)):
        raise InvalidInputError("curvature undefined (zero parametric speed)")
    return kappa


def resample_by_arclength(path: BasePath, ds: float) -> BasePath:
    """Resample a polyline to vertices exactly ``ds`` apart (as chords).

    Both endpoints are kept. The leftover piece before the end is its own
    chord when at least ``ds / 2`` long, otherwise it is merged into the last
    full chord. Vertices that are already ``ds`` apart are reproduced, so
    resampling twice with the same ``ds`` changes nothing.
    """
    if not ds > 0.0:
        raise InvalidInputError(f"ds must be positive, got {ds}")
    length = path.length
    if ds > length * (1.0 + 1e-12):
        raise InvalidInputError(f"ds={ds} exceeds path length {length}")
    vx = np.ascontiguousarray(path.vertices[:, 0])
    vy = np.ascontiguousarray(path.vertices[:, 1])
    end = path.vertices[-1]
    pts, placed = kernels.chord_march(vx, vy, float(ds), int(np.ceil(length / ds)) + 2)
    pts = pts[:placed + 1]
    if np.hypot(*(pts[-1] - end)) < 0.5 * ds and len(pts) > 1:
        pts = pts[:-1]
    return BasePath(np.vstack([pts, end]))
