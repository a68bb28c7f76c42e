"""Frenet frame over a base path and lateral-offset candidate generation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InvalidConfigError, OutOfDomainError
from .trajectory import BasePath, Trajectory, derive_kinematics, resample_by_arclength

_S_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class FrenetFrame:
    """Resampled base path with unit tangents and left normals per vertex."""

    base: BasePath
    tangents: np.ndarray
    normals: np.ndarray

    @property
    def length(self) -> float:
        return self.base.length

    @property
    def s(self) -> np.ndarray:
        return self.base.cumulative_arclength

    def heading(self, s):
        """Heading of the interpolated tangent at arc length ``s``."""
        _, tan = self._interp(np.asarray(s, dtype=float))
        return np.arctan2(tan[..., 1], tan[..., 0])

    def _interp(self, s):
        s_grid = self.s
        idx = np.clip(np.searchsorted(s_grid, s, side="right") - 1, 0, len(s_grid) - 2)
        u = (s - s_grid[idx]) / (s_grid[idx + 1] - s_grid[idx])
        u = u[..., None]
        v = self.base.vertices
        point = v[idx] + u * (v[idx + 1] - v[idx])
        tan = self.tangents[idx] + u * (self.tangents[idx + 1] - self.tangents[idx])
        return point, tan


def build_frenet_frame(path: BasePath, ds: float) -> FrenetFrame:
    base = resample_by_arclength(path, min(ds, path.length))
    verts = base.vertices
    tan = np.gradient(verts, base.cumulative_arclength, axis=0, edge_order=2 if len(verts) > 2 else 1)
    tan /= np.hypot(tan[:, 0], tan[:, 1])[:, None]
    normals = np.column_stack([-tan[:, 1], tan[:, 0]])
    tan.flags.writeable = False
    normals.flags.writeable = False
    return FrenetFrame(base, tan, normals)


def _project(frame: FrenetFrame, x, y, extrapolate: bool):
    px = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    py = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=float)))
    v = frame.base.vertices
    s, d = kernels.project(
        px, py,
        np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]),
        np.ascontiguousarray(frame.s),
        np.ascontiguousarray(frame.tangents[:, 0]), np.ascontiguousarray(frame.tangents[:, 1]),
    )
    missing = np.isnan(s)
    if np.any(missing):
        if not extrapolate:
            i = int(np.flatnonzero(missing)[0])
            raise OutOfDomainError(f"point ({px[i]}, {py[i]}) projects beyond the base path")
        # straight-line continuation of the end tangents
        for i in np.flatnonzero(missing):
            p = np.array([px[i], py[i]])
            w0 = p - v[0]
            s0 = float(w0 @ frame.tangents[0])
            w1 = p - v[-1]
            s1 = float(w1 @ frame.tangents[-1])
            options = []
            if s0 <= 0.0:
                options.append((abs(w0 @ frame.normals[0]), s0, float(w0 @ frame.normals[0])))
            if s1 >= 0.0:
                options.append((abs(w1 @ frame.normals[-1]), frame.length + s1, float(w1 @ frame.normals[-1])))
            if not options:
                raise OutOfDomainError(f"point ({px[i]}, {py[i]}) has no projection on the base path")
            _, s[i], d[i] = min(options)
    return s, d


def to_frenet(frame: FrenetFrame, point) -> tuple[float, float]:
    """Curvilinear ``(s, d)`` of a planar point; ``d`` is positive to the left."""
    s, d = _project(frame, point[0], point[1], extrapolate=False)
    return float(s[0]), float(d[0])


def to_frenet_many(frame: FrenetFrame, x, y, extrapolate: bool = False):
    """Vectorised :func:`to_frenet`. With ``extrapolate`` the end segments extend as rays."""
    return _project(frame, x, y, extrapolate)


def from_frenet(frame: FrenetFrame, s, d):
    """Planar point at arc length ``s`` and lateral offset ``d``. Arrays broadcast."""
    s_arr = np.asarray(s, dtype=float)
    d_arr = np.asarray(d, dtype=float)
    if np.any(s_arr < -_S_EPS) or np.any(s_arr > frame.length + _S_EPS * max(frame.length, 1.0)):
        raise OutOfDomainError(f"s outside [0, {frame.length}]")
    s_arr = np.clip(s_arr, 0.0, frame.length)
    point, tan = frame._interp(s_arr)
    normal = np.stack([-tan[..., 1], tan[..., 0]], axis=-1)
    normal /= np.linalg.norm(normal, axis=-1, keepdims=True)
    return point + d_arr[..., None] * normal


@dataclass(frozen=True)
class CandidateConfig:
    """Lateral terminal offsets [m], horizon [m], constant speed [m/s], spacing [m]."""

    lateral_offsets: tuple = (-1.0, 0.0, 1.0)
    horizon: float = 40.0
    speed: float = 10.0
    sample_spacing: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lateral_offsets", tuple(float(o) for o in self.lateral_offsets))
        if not self.lateral_offsets:
            raise InvalidConfigError("at least one lateral offset is required")
        if not self.horizon > 0.0:
            raise InvalidConfigError(f"horizon must be positive, got {self.horizon}")
        if not self.sample_spacing > 0.0:
            raise InvalidConfigError(f"sample_spacing must be positive, got {self.sample_spacing}")
        if not self.speed > 0.0:
            raise InvalidConfigError(f"speed must be positive, got {self.speed}")


def quintic_coefficients(d0, dd0, ddd0, d1, dd1, ddd1, length):
    """Coefficients c0..c5 of d(u) = sum c_k u^k on [0, length] meeting both boundary triples."""
    c0, c1, c2 = d0, dd0, ddd0 / 2.0
    L = length
    A = np.array([
        [L**3, L**4, L**5],
        [3 * L**2, 4 * L**3, 5 * L**4],
        [6 * L, 12 * L**2, 20 * L**3],
    ])
    b = np.array([
        d1 - (c0 + c1 * L + c2 * L**2),
        dd1 - (c1 + 2 * c2 * L),
        ddd1 - 2 * c2,
    ])
    c3, c4, c5 = np.linalg.solve(A, b)
    return np.array([c0, c1, c2, c3, c4, c5])


def generate_candidates(frame: FrenetFrame, start: Sequence[float], config: CandidateConfig,
                        t0: float = 0.0) -> list[Trajectory]:
    """One candidate per lateral offset, all sharing the same time grid.

    ``start`` is ``(s0, d0, heading_error)``. The lateral profile is a quintic
    in arc length from ``(d0, tan(heading_error), 0)`` to ``(offset, 0, 0)``;
    time advances at ``config.speed`` along the base path.
    """
    s0, d0, heading_err = (float(v) for v in start)
    if s0 < 0.0 or s0 > frame.length:
        raise OutOfDomainError(f"start s={s0} outside [0, {frame.length}]")
    if s0 + config.horizon > frame.length * (1.0 + 1e-12):
        raise InvalidConfigError(
            f"horizon {config.horizon} m from s={s0} exceeds path length {frame.length} m")
    n = max(4, int(round(config.horizon / config.sample_spacing)) + 1)
    u = np.linspace(0.0, config.horizon, n)
    s = np.minimum(s0 + u, frame.length)
    t = t0 + u / config.speed
    slope0 = np.tan(heading_err)
    out = []
    for offset in config.lateral_offsets:
        coeffs = quintic_coefficients(d0, slope0, 0.0, offset, 0.0, 0.0, config.horizon)
        d = np.polynomial.polynomial.polyval(u, coeffs)
        d[-1] = offset
        xy = from_frenet(frame, s, d)
        out.append(derive_kinematics(t, xy[:, 0], xy[:, 1]))
    return out
