"""Hot numeric kernels.

Every kernel exists twice: a numba ``*_numba`` version and a pure-numpy
``*_numpy`` version with identical semantics. The public name is bound to one
of them at import time according to :data:`comfortcost._jit.USE_NUMBA`.
Inputs are assumed validated by the callers; kernels do not raise.
"""
import numpy as np

from ._jit import USE_NUMBA, njit

# Relative slack on the segment parameter when deciding whether a projection
# root lies inside a segment.
_U_EPS = 1e-9


# --------------------------------------------------------------------------
# trapezoidal integration


@njit
def trapezoid_numba(y, t):
    total = 0.0
    for i in range(t.shape[0] - 1):
        total += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i])
    return total


def trapezoid_numpy(y, t):
    dt = np.diff(t)
    return float(np.sum(0.5 * (y[:-1] + y[1:]) * dt))


# --------------------------------------------------------------------------
# curvature on a non-uniform parameter grid


@njit
def curvature_numba(t, x, y):
    n = t.shape[0]
    kappa = np.empty(n)
    for i in range(1, n - 1):
        h1 = t[i] - t[i - 1]
        h2 = t[i + 1] - t[i]
        c0 = -h2 / (h1 * (h1 + h2))
        c1 = (h2 - h1) / (h1 * h2)
        c2 = h1 / (h2 * (h1 + h2))
        e0 = 2.0 / (h1 * (h1 + h2))
        e1 = -2.0 / (h1 * h2)
        e2 = 2.0 / (h2 * (h1 + h2))
        xd = c0 * x[i - 1] + c1 * x[i] + c2 * x[i + 1]
        yd = c0 * y[i - 1] + c1 * y[i] + c2 * y[i + 1]
        xdd = e0 * x[i - 1] + e1 * x[i] + e2 * x[i + 1]
        ydd = e0 * y[i - 1] + e1 * y[i] + e2 * y[i + 1]
        kappa[i] = (xd * ydd - xdd * yd) / (xd * xd + yd * yd) ** 1.5
    kappa[0] = kappa[1]
    kappa[n - 1] = kappa[n - 2]
    return kappa


def curvature_numpy(t, x, y):
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    c0 = -h2 / (h1 * (h1 + h2))
    c1 = (h2 - h1) / (h1 * h2)
    c2 = h1 / (h2 * (h1 + h2))
    e0 = 2.0 / (h1 * (h1 + h2))
    e1 = -2.0 / (h1 * h2)
    e2 = 2.0 / (h2 * (h1 + h2))
    xd = c0 * x[:-2] + c1 * x[1:-1] + c2 * x[2:]
    yd = c0 * y[:-2] + c1 * y[1:-1] + c2 * y[2:]
    xdd = e0 * x[:-2] + e1 * x[1:-1] + e2 * x[2:]
    ydd = e0 * y[:-2] + e1 * y[1:-1] + e2 * y[2:]
    kappa = np.empty(t.shape[0])
    kappa[1:-1] = (xd * ydd - xdd * yd) / (xd * xd + yd * yd) ** 1.5
    kappa[0] = kappa[1]
    kappa[-1] = kappa[-2]
    return kappa


# --------------------------------------------------------------------------
# signed clearance from points to discs and convex polygons
#
# Polygons are packed as one (M, 2) vertex array plus K+1 offsets; polygon k
# owns rows offsets[k]:offsets[k+1], counter-clockwise.


@njit
def clearance_numba(px, py, cx, cy, cr, poly_xy, poly_off):
    n = px.shape[0]
    nd = cx.shape[0]
    npoly = poly_off.shape[0] - 1
    out = np.empty((n, nd + npoly))
    for i in range(n):
        for k in range(nd):
            dx = px[i] - cx[k]
            dy = py[i] - cy[k]
            out[i, k] = np.sqrt(dx * dx + dy * dy) - cr[k]
        for k in range(npoly):
            lo = poly_off[k]
            hi = poly_off[k + 1]
            best = np.inf
            inside = True
            for j in range(lo, hi):
                jn = j + 1 if j + 1 < hi else lo
                ax = poly_xy[j, 0]
                ay = poly_xy[j, 1]
                ex = poly_xy[jn, 0] - ax
                ey = poly_xy[jn, 1] - ay
                wx = px[i] - ax
                wy = py[i] - ay
                if ex * wy - ey * wx < 0.0:
                    inside = False
                u = (wx * ex + wy * ey) / (ex * ex + ey * ey)
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
                qx = wx - u * ex
                qy = wy - u * ey
                dist = np.sqrt(qx * qx + qy * qy)
                if dist < best:
                    best = dist
            out[i, nd + k] = -best if inside else best
    return out


def clearance_numpy(px, py, cx, cy, cr, poly_xy, poly_off):
    n = px.shape[0]
    nd = cx.shape[0]
    npoly = poly_off.shape[0] - 1
    out = np.empty((n, nd + npoly))
    if nd:
        out[:, :nd] = np.hypot(px[:, None] - cx[None, :], py[:, None] - cy[None, :]) - cr[None, :]
    for k in range(npoly):
        verts = poly_xy[poly_off[k]:poly_off[k + 1]]
        a = verts
        e = np.roll(verts, -1, axis=0) - verts
        wx = px[:, None] - a[None, :, 0]
        wy = py[:, None] - a[None, :, 1]
        cross = e[None, :, 0] * wy - e[None, :, 1] * wx
        inside = np.all(cross >= 0.0, axis=1)
        u = np.clip((wx * e[None, :, 0] + wy * e[None, :, 1]) / np.sum(e * e, axis=1)[None, :], 0.0, 1.0)
        dist = np.hypot(wx - u * e[None, :, 0], wy - u * e[None, :, 1]).min(axis=1)
        out[:, nd + k] = np.where(inside, -dist, dist)
    return out


# --------------------------------------------------------------------------
# Frenet projection with linearly interpolated vertex tangents
#
# On segment i the base point is a + u*e and the tangent is
# (1-u)*ta + u*tb. The foot point solves (p - a - u*e) . tangent(u) = 0,
# a quadratic in u. Among all in-range roots the one with the smallest |d|
# wins; equal |d| keeps the smaller s.


@njit
def project_numba(px, py, vx, vy, vs, tx, ty):
    n = px.shape[0]
    m = vx.shape[0] - 1
    s_out = np.full(n, np.nan)
    d_out = np.full(n, np.nan)
    for i in range(n):
        best_abs = np.inf
        for j in range(m):
            ex = vx[j + 1] - vx[j]
            ey = vy[j + 1] - vy[j]
            wx = px[i] - vx[j]
            wy = py[i] - vy[j]
            dtx = tx[j + 1] - tx[j]
            dty = ty[j + 1] - ty[j]
            qa = -(ex * dtx + ey * dty)
            qb = (wx * dtx + wy * dty) - (ex * tx[j] + ey * ty[j])
            qc = wx * tx[j] + wy * ty[j]
            r0 = np.nan
            r1 = np.nan
            if abs(qa) < 1e-14 * (abs(qb) + 1e-300):
                if qb != 0.0:
                    r0 = -qc / qb
            else:
                disc = qb * qb - 4.0 * qa * qc
                if disc >= 0.0:
                    sq = np.sqrt(disc)
                    q = -0.5 * (qb + sq) if qb >= 0.0 else -0.5 * (qb - sq)
                    r0 = q / qa
                    if q != 0.0:
                        r1 = qc / q
            for r in (r0, r1):
                if not (r >= -_U_EPS and r <= 1.0 + _U_EPS):
                    continue
                u = min(max(r, 0.0), 1.0)
                bx = vx[j] + u * ex
                by = vy[j] + u * ey
                ttx = tx[j] + u * dtx
                tty = ty[j] + u * dty
                tn = np.sqrt(ttx * ttx + tty * tty)
                d = ((px[i] - bx) * (-tty) + (py[i] - by) * ttx) / tn
                s = vs[j] + u * (vs[j + 1] - vs[j])
                if abs(d) < best_abs or (abs(d) == best_abs and s < s_out[i]):
                    best_abs = abs(d)
                    s_out[i] = s
                    d_out[i] = d
    return s_out, d_out


def project_numpy(px, py, vx, vy, vs, tx, ty):
    ex = np.diff(vx)[None, :]
    ey = np.diff(vy)[None, :]
    dtx = np.diff(tx)[None, :]
    dty = np.diff(ty)[None, :]
    tx0 = tx[None, :-1]
    ty0 = ty[None, :-1]
    wx = px[:, None] - vx[None, :-1]
    wy = py[:, None] - vy[None, :-1]
    qa = np.broadcast_to(-(ex * dtx + ey * dty), wx.shape)
    qb = (wx * dtx + wy * dty) - (ex * tx0 + ey * ty0)
    qc = wx * tx0 + wy * ty0

    with np.errstate(divide="ignore", invalid="ignore"):
        linear = np.abs(qa) < 1e-14 * (np.abs(qb) + 1e-300)
        disc = qb * qb - 4.0 * qa * qc
        sq = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
        q = np.where(qb >= 0.0, -0.5 * (qb + sq), -0.5 * (qb - sq))
        r0 = np.where(linear, np.where(qb != 0.0, -qc / qb, np.nan), q / qa)
        r1 = np.where(linear | (q == 0.0), np.nan, qc / q)

    seg_s0 = vs[None, :-1]
    seg_ds = np.diff(vs)[None, :]
    absd, ss, dd = [], [], []
    for r in (r0, r1):
        ok = (r >= -_U_EPS) & (r <= 1.0 + _U_EPS)
        u = np.clip(np.where(ok, r, 0.0), 0.0, 1.0)
        bx = vx[None, :-1] + u * ex
        by = vy[None, :-1] + u * ey
        ttx = tx0 + u * dtx
        tty = ty0 + u * dty
        d = ((px[:, None] - bx) * (-tty) + (py[:, None] - by) * ttx) / np.hypot(ttx, tty)
        absd.append(np.where(ok, np.abs(d), np.inf))
        ss.append(seg_s0 + u * seg_ds)
        dd.append(d)
    absd, ss, dd = np.hstack(absd), np.hstack(ss), np.hstack(dd)
    # lexicographic (|d|, s) minimum, the same choice the numba loop makes
    best_abs = absd.min(axis=1)
    pick = np.argmin(np.where(absd == best_abs[:, None], ss, np.inf), axis=1)
    rows = np.arange(absd.shape[0])
    found = np.isfinite(best_abs)
    s_out = np.where(found, ss[rows, pick], np.nan)
    d_out = np.where(found, dd[rows, pick], np.nan)
    return s_out, d_out


# --------------------------------------------------------------------------
# equal-chord march along a polyline


@njit
def chord_march_numba(vx, vy, h, n):
    """Place up to ``n`` points after vertex 0, each at chord distance ``h``.

    Returns the (n+1, 2) point array and how many points were placed.
    """
    out = np.empty((n + 1, 2))
    out[0, 0] = vx[0]
    out[0, 1] = vy[0]
    m = vx.shape[0] - 1
    seg = 0
    cx = vx[0]
    cy = vy[0]
    for k in range(1, n + 1):
        found = False
        # moving along the current segment first
        ex = vx[seg + 1] - cx
        ey = vy[seg + 1] - cy
        rem = np.sqrt(ex * ex + ey * ey)
        if rem >= h:
            cx = cx + h * ex / rem
            cy = cy + h * ey / rem
            found = True
        else:
            j = seg + 1
            while j < m:
                ax = vx[j] - cx
                ay = vy[j] - cy
                sx = vx[j + 1] - vx[j]
                sy = vy[j + 1] - vy[j]
                qa = sx * sx + sy * sy
                qb = 2.0 * (ax * sx + ay * sy)
                qc = ax * ax + ay * ay - h * h
                disc = qb * qb - 4.0 * qa * qc
                tau = (-qb + np.sqrt(max(disc, 0.0))) / (2.0 * qa)
                if tau <= 1.0:
                    cx = vx[j] + tau * sx
                    cy = vy[j] + tau * sy
                    seg = j
                    found = True
                    break
                j += 1
        if not found:
            return out, k - 1
        out[k, 0] = cx
        out[k, 1] = cy
    return out, n


def chord_march_numpy(vx, vy, h, n):
    out = np.empty((n + 1, 2))
    out[0] = vx[0], vy[0]
    m = vx.shape[0] - 1
    seg = 0
    c = np.array([vx[0], vy[0]])
    verts = np.column_stack([vx, vy])
    for k in range(1, n + 1):
        rem_vec = verts[seg + 1] - c
        rem = float(np.hypot(*rem_vec))
        if rem >= h:
            c = c + h * rem_vec / rem
        else:
            for j in range(seg + 1, m):
                a = verts[j] - c
                e = verts[j + 1] - verts[j]
                qa = float(e @ e)
                qb = 2.0 * float(a @ e)
                qc = float(a @ a) - h * h
                tau = (-qb + np.sqrt(max(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
                if tau <= 1.0:
                    c = verts[j] + tau * e
                    seg = j
                    break
            else:
                return out, k - 1
        out[k] = c
    return out, n


if USE_NUMBA:
    trapezoid = trapezoid_numba
    curvature = curvature_numba
    clearance = clearance_numba
    project = project_numba
    chord_march = chord_march_numba
else:
    trapezoid = trapezoid_numpy
    curvature = curvature_numpy
    clearance = clearance_numpy
    project = project_numpy
    chord_march = chord_march_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
