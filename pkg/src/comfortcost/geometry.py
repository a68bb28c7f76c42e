"""Convex planar shapes, obstacle sets and point clearances."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import InvalidInputError


@dataclass(frozen=True)
class Disc:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "radius", float(self.radius))
        if not (np.all(np.isfinite(self.center)) and np.isfinite(self.radius)):
            raise InvalidInputError("disc parameters must be finite")
        if self.radius <= 0.0:
            raise InvalidInputError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon; vertices are reordered counter-clockwise on construction."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise InvalidInputError("a polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(verts)):
            raise InvalidInputError("polygon vertices must be finite")
        area2 = np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1])
        if abs(area2) <= 1e-12:
            raise InvalidInputError("degenerate polygon (zero area)")
        if area2 < 0.0:
            verts = verts[::-1].copy()
        e = np.roll(verts, -1, axis=0) - verts
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        if np.any(cross < -1e-12):
            raise InvalidInputError("polygon is not convex")
        verts.flags.writeable = False
        object.__setattr__(self, "vertices", verts)

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and np.array_equal(self.vertices, other.vertices)

    __hash__ = None


Shape = Union[Disc, ConvexPolygon]


def _pack(shapes: Sequence[Shape]):
    discs = [s for s in shapes if isinstance(s, Disc)]
    polys = [s for s in shapes if isinstance(s, ConvexPolygon)]
    cx = np.array([d.center[0] for d in discs], dtype=float)
    cy = np.array([d.center[1] for d in discs], dtype=float)
    cr = np.array([d.radius for d in discs], dtype=float)
    if polys:
        poly_xy = np.ascontiguousarray(np.concatenate([p.vertices for p in polys]))
        poly_off = np.concatenate([[0], np.cumsum([len(p.vertices) for p in polys])]).astype(np.int64)
    else:
        poly_xy = np.zeros((0, 2))
        poly_off = np.zeros(1, dtype=np.int64)
    # kernel columns come out discs first; remember original order
    order = [i for i, s in enumerate(shapes) if isinstance(s, Disc)] + [
        i for i, s in enumerate(shapes) if isinstance(s, ConvexPolygon)
    ]
    return (cx, cy, cr, poly_xy, poly_off), np.argsort(order)


def signed_clearance(shapes: Sequence[Shape], x, y) -> np.ndarray:
    """Signed distance from each point to each shape, shape ``(n_points, n_shapes)``.

    Negative inside a shape. Column order follows ``shapes``.
    """
    px = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    py = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=float)))
    if not shapes:
        return np.zeros((px.shape[0], 0))
    packed, inverse = _pack(shapes)
    out = kernels.clearance(px, py, *packed)
    return out[:, inverse]


def distance_to_region(shape: Shape, x: float, y: float) -> float:
    """Euclidean distance from a point to a shape, 0 inside."""
    return max(0.0, float(signed_clearance([shape], x, y)[0, 0]))


@dataclass(frozen=True)
class ObstacleSet:
    """Static obstacles plus the distance at which proximity starts to cost."""

    obstacles: tuple = field(default_factory=tuple)
    d_influence: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.d_influence > 0.0:
            raise InvalidInputError(f"d_influence must be positive, got {self.d_influence}")
        for ob in self.obstacles:
            if not isinstance(ob, (Disc, ConvexPolygon)):
                raise InvalidInputError(f"unsupported obstacle shape {type(ob).__name__}")

    def __len__(self):
        return len(self.obstacles)

    def clearances(self, x, y) -> np.ndarray:
        return signed_clearance(self.obstacles, x, y)

    def with_obstacle(self, obstacle: Shape) -> "ObstacleSet":
        return ObstacleSet(self.obstacles + (obstacle,), self.d_influence)
