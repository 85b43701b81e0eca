"""Pure-Python/numpy contact solver, used when the compiled extension is absent.

Mirrors ``_solver.pyx`` operation for operation.  Pair candidates are found
with vectorised tests but applied strictly in (i, j) lexicographic order, and
every arithmetic expression keeps the compiled kernel's evaluation order, so
results are bit-identical.
"""

import math

import numpy as np


def _separate(x, y, r, w, i, j):
    xi, yi, xj, yj = float(x[i]), float(y[i]), float(x[j]), float(y[j])
    dx = xj - xi
    dy = yj - yi
    rs = float(r[i]) + float(r[j])
    d2 = dx * dx + dy * dy
    if not d2 < rs * rs:
        return
    d = math.sqrt(d2)
    if d > 0.0:
        nx = dx / d
        ny = dy / d
    else:
        nx, ny = 1.0, 0.0
    overlap = rs - d
    wi, wj = float(w[i]), float(w[j])
    wsum = wi + wj
    ci = overlap * wi / wsum
    cj = overlap * wj / wsum
    x[i] = xi - nx * ci
    y[i] = yi - ny * ci
    x[j] = xj + nx * cj
    y[j] = yj + ny * cj


def _pair_sweep(x, y, r, w):
    n = x.shape[0]
    for i in range(n - 1):
        j0 = i + 1
        while j0 < n:
            dx = x[j0:] - x[i]
            dy = y[j0:] - y[i]
            rs = r[j0:] + r[i]
            hit = np.flatnonzero(dx * dx + dy * dy < rs * rs)
            if hit.size == 0:
                break
            j = j0 + int(hit[0])
            _separate(x, y, r, w, i, j)
            j0 = j + 1


def residual(x, y, r):
    n = x.shape[0]
    if n < 2:
        return 0.0
    iu, ju = np.triu_indices(n, k=1)
    dx = x[ju] - x[iu]
    dy = y[ju] - y[iu]
    rs = r[iu] + r[ju]
    d2 = dx * dx + dy * dy
    hit = d2 < rs * rs
    if not hit.any():
        return 0.0
    return float((rs[hit] - np.sqrt(d2[hit])).max())


def _segment_distance(px, py, ax, ay, bx, by):
    abx = bx - ax
    aby = by - ay
    t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
    t = np.clip(t, 0.0, 1.0)
    dx = px - (ax + t * abx)
    dy = py - (ay + t * aby)
    return np.sqrt(dx * dx + dy * dy)


def _walls(x, y, r, grp, bars, solid, doors, door_ok):
    n = x.shape[0]
    if n == 0:
        return
    in_door = np.zeros(n, dtype=bool)
    for e in range(doors.shape[0]):
        ok = door_ok[grp, e].astype(bool)
        d = _segment_distance(x, y, *doors[e])
        in_door |= ok & (d < r)
    px = x.copy()
    py = y.copy()
    for b in range(bars.shape[0]):
        ax, ay, bx, by, nx, ny = (float(v) for v in bars[b])
        act = solid[grp, b].astype(bool) & ~in_door
        if not act.any():
            continue
        abx = bx - ax
        aby = by - ay
        t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
        interior = (t > 0.0) & (t < 1.0)

        s = (px - ax) * nx + (py - ay) * ny
        push = act & interior & (s < r)
        new_x = np.where(push, px + (r - s) * nx, px)
        new_y = np.where(push, py + (r - s) * ny, py)

        qx = np.where(t <= 0.0, ax, bx)
        qy = np.where(t <= 0.0, ay, by)
        ddx = px - qx
        ddy = py - qy
        d2 = ddx * ddx + ddy * ddy
        cap = act & ~interior & (d2 < r * r)
        if cap.any():
            d = np.sqrt(d2)
            with np.errstate(divide="ignore", invalid="ignore"):
                rx = np.where(d > 0.0, qx + ddx * (r / d), qx + nx * r)
                ry = np.where(d > 0.0, qy + ddy * (r / d), qy + ny * r)
            new_x = np.where(cap, rx, new_x)
            new_y = np.where(cap, ry, new_y)
        px, py = new_x, new_y
    x[:] = px
    y[:] = py


def resolve(x, y, r, w, grp, bars, solid, doors, door_ok, iterations, tol):
    """In-place sweeps; returns ``(iterations_used, max_residual_penetration)``."""
    it = 0
    res = 0.0
    while it < iterations:
        it += 1
        _pair_sweep(x, y, r, w)
        _walls(x, y, r, grp, bars, solid, doors, door_ok)
        res = residual(x, y, r)
        if res <= tol:
            break
    return it, res
