import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comfortcost.errors import InvalidInputError
from comfortcost.geometry import ConvexPolygon, Disc, ObstacleSet, distance_to_region, signed_clearance


def test_disc_clearance():
    c = signed_clearance([Disc((0.0, 0.0), 1.0)], [3.0, 0.0, 0.5], [4.0, 0.0, 0.0])
    assert np.allclose(c[:, 0], [4.0, -1.0, -0.5])


def test_polygon_clearance(box):
    c = signed_clearance([box], [1.0, 3.0, 1.0, 3.0], [0.5, 0.5, 3.0, 2.0])[:, 0]
    assert np.allclose(c, [-0.5, 1.0, 2.0, np.hypot(1.0, 1.0)])


def test_polygon_reordered_ccw():
    cw = ConvexPolygon([[0, 0], [0, 1], [1, 1], [1, 0]])
    x, y = cw.vertices.T
    assert np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0


@pytest.mark.parametrize("verts", [
    [[0, 0], [1, 0]],
    [[0, 0], [1, 0], [2, 0]],
    [[0, 0], [2, 0], [1, 0.2], [1, 2]],
    [[0, 0], [1, np.inf], [1, 1]],
])
def test_polygon_rejects(verts):
    with pytest.raises(InvalidInputError):
        ConvexPolygon(verts)


@pytest.mark.parametrize("radius", [0.0, -1.0, np.nan])
def test_disc_rejects(radius):
    with pytest.raises(InvalidInputError):
        Disc((0.0, 0.0), radius)


def test_column_order_follows_input(box):
    shapes = [box, Disc((10.0, 0.0), 1.0), box]
    c = signed_clearance(shapes, [10.0], [0.0])[0]
    assert c[1] == -1.0 and c[0] == c[2] == pytest.approx(8.0)


def test_distance_to_region(box):
    assert distance_to_region(box, 1.0, 0.5) == 0.0
    assert distance_to_region(box, 5.0, 0.5) == pytest.approx(3.0)
    assert distance_to_region(Disc((0, 0), 2.0), 0.0, 5.0) == pytest.approx(3.0)


def test_obstacle_set():
    with pytest.raises(InvalidInputError):
        ObstacleSet((), d_influence=0.0)
    with pytest.raises(InvalidInputError):
        ObstacleSet(("not a shape",))
    s = ObstacleSet().with_obstacle(Disc((0, 0), 1.0))
    assert len(s) == 1
    assert ObstacleSet().clearances([0.0, 1.0], [0.0, 1.0]).shape == (2, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_polygon_clearance_matches_dense_boundary(seed):
    # oracle: distance to a densely sampled boundary, sign from the half-planes
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0, 2 * np.pi, 6))
    if np.min(np.diff(np.r_[ang, ang[0] + 2 * np.pi])) < 0.05:
        return
    poly = ConvexPolygon(np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.5, 3.0))
    v = poly.vertices
    w = np.linspace(0, 1, 2001)[:, None]
    boundary = np.vstack([v[i] + w * (v[(i + 1) % len(v)] - v[i]) for i in range(len(v))])
    pts = rng.uniform(-4, 4, (40, 2))
    got = signed_clearance([poly], pts[:, 0], pts[:, 1])[:, 0]
    dist = np.min(np.hypot(*(pts[:, None, :] - boundary[None]).transpose(2, 0, 1)), axis=1)
    e = np.roll(v, -1, axis=0) - v
    inside = np.all(e[None, :, 0] * (pts[:, None, 1] - v[None, :, 1])
                    - e[None, :, 1] * (pts[:, None, 0] - v[None, :, 0]) >= 0, axis=1)
    np.testing.assert_allclose(got, np.where(inside, -dist, dist), atol=5e-3)
