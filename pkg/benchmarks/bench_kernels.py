"""Time each kernel's numba and numpy implementations on the same inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--size N]

Both variants are called directly, so the COMFORTCOST_DISABLE_NUMBA flag does
not matter here. The numba column excludes compile time (one warm-up call).
"""
import argparse
import timeit

import numpy as np

from comfortcost import kernels
from comfortcost.frenet import build_frenet_frame
from comfortcost.geometry import ConvexPolygon, Disc, _pack
from comfortcost.trajectory import BasePath


def cases(n):
    rng = np.random.default_rng(0)
    t = np.linspace(0.0, 20.0, n)
    x = 5.0 * t
    y = 3.0 * np.sin(0.2 * x)
    yield "trapezoid", (y * y, t)
    yield "curvature", (t, x, y)

    shapes = [Disc((float(cx), float(cy)), 0.5) for cx, cy in rng.uniform(0, 100, (8, 2))]
    shapes += [ConvexPolygon([[a, b], [a + 2, b], [a + 2, b + 1], [a, b + 1]])
               for a, b in rng.uniform(0, 100, (4, 2))]
    packed, _ = _pack(shapes)
    yield "clearance", (x, y, *packed)

    xs = np.linspace(0.0, 100.0, 201)
    frame = build_frenet_frame(BasePath(np.column_stack([xs, 4.0 * np.sin(0.05 * xs)])), 0.5)
    v = frame.base.vertices
    yield "project", (x, y, np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]),
                      np.ascontiguousarray(frame.s), np.ascontiguousarray(frame.tangents[:, 0]),
                      np.ascontiguousarray(frame.tangents[:, 1]))
    yield "chord_march", (np.ascontiguousarray(x), np.ascontiguousarray(y), 0.25, int(n * 5))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--size", type=int, default=1000, help="samples per trajectory")
    args = ap.parse_args()
    print(f"{'kernel':<12} {'numba [us]':>12} {'numpy [us]':>12} {'speedup':>8}")
    for name, inputs in cases(args.size):
        fast = getattr(kernels, f"{name}_numba")
        slow = getattr(kernels, f"{name}_numpy")
        fast(*inputs)
        t_fast = min(timeit.repeat(lambda: fast(*inputs), number=args.repeat, repeat=3)) / args.repeat
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=args.repeat, repeat=3)) / args.repeat
        print(f"{name:<12} {t_fast * 1e6:12.1f} {t_slow * 1e6:12.1f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
