# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled contact solver.

Must stay operation-for-operation identical to ``_solver_py``; the build
disables floating-point contraction so both produce the same bits.
"""

from libc.math cimport sqrt


cdef inline void _separate(double[::1] x, double[::1] y, const double[::1] r,
                           const double[::1] w, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef double dx = x[j] - x[i]
    cdef double dy = y[j] - y[i]
    cdef double rs = r[i] + r[j]
    cdef double d2 = dx * dx + dy * dy
    cdef double d, nx, ny, overlap, wsum, ci, cj
    if d2 < rs * rs:
        d = sqrt(d2)
        if d > 0.0:
            nx = dx / d
            ny = dy / d
        else:
            nx = 1.0
            ny = 0.0
        overlap = rs - d
        wsum = w[i] + w[j]
        ci = overlap * w[i] / wsum
        cj = overlap * w[j] / wsum
        x[i] = x[i] - nx * ci
        y[i] = y[i] - ny * ci
        x[j] = x[j] + nx * cj
        y[j] = y[j] + ny * cj


cdef double _residual(const double[::1] x, const double[::1] y,
                      const double[::1] r) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, rs, d2, pen
    cdef double worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[j] - x[i]
            dy = y[j] - y[i]
            rs = r[i] + r[j]
            d2 = dx * dx + dy * dy
            if d2 < rs * rs:
                pen = rs - sqrt(d2)
                if pen > worst:
                    worst = pen
    return worst


cdef inline bint _in_doorway(double px, double py, double rad, const double[:, ::1] doors,
                             const unsigned char[::1] door_ok) noexcept nogil:
    cdef Py_ssize_t e
    cdef double ax, ay, abx, aby, t, qx, qy, dx, dy
    for e in range(doors.shape[0]):
        if not door_ok[e]:
            continue
        ax = doors[e, 0]
        ay = doors[e, 1]
        abx = doors[e, 2] - ax
        aby = doors[e, 3] - ay
        t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx = ax + t * abx
        qy = ay + t * aby
        dx = px - qx
        dy = py - qy
        if sqrt(dx * dx + dy * dy) < rad:
            return True
    return False


cdef void _walls(double[::1] x, double[::1] y, const double[::1] r, const int[::1] grp,
                 const double[:, ::1] bars, const unsigned char[:, ::1] solid,
                 const double[:, ::1] doors, const unsigned char[:, ::1] door_ok) noexcept nogil:
    cdef Py_ssize_t k, b
    cdef int g
    cdef double px, py, rad, ax, ay, bx, by, nx, ny, abx, aby, t, s, qx, qy, ddx, ddy, d2, d
    for k in range(x.shape[0]):
        g = grp[k]
        px = x[k]
        py = y[k]
        rad = r[k]
        if _in_doorway(px, py, rad, doors, door_ok[g]):
            continue
        for b in range(bars.shape[0]):
            if not solid[g, b]:
                continue
            ax = bars[b, 0]
            ay = bars[b, 1]
            bx = bars[b, 2]
            by = bars[b, 3]
            nx = bars[b, 4]
            ny = bars[b, 5]
            abx = bx - ax
            aby = by - ay
            t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
            if t > 0.0 and t < 1.0:
                s = (px - ax) * nx + (py - ay) * ny
                if s < rad:
                    px = px + (rad - s) * nx
                    py = py + (rad - s) * ny
            else:
                if t <= 0.0:
                    qx = ax
                    qy = ay
                else:
                    qx = bx
                    qy = by
                ddx = px - qx
                ddy = py - qy
                d2 = ddx * ddx + ddy * ddy
                if d2 < rad * rad:
                    d = sqrt(d2)
                    if d > 0.0:
                        px = qx + ddx * (rad / d)
                        py = qy + ddy * (rad / d)
                    else:
                        px = qx + nx * rad
                        py = qy + ny * rad
        x[k] = px
        y[k] = py


def resolve(double[::1] x, double[::1] y, const double[::1] r, const double[::1] w,
            const int[::1] grp, const double[:, ::1] bars, const unsigned char[:, ::1] solid,
            const double[:, ::1] doors, const unsigned char[:, ::1] door_ok,
            int iterations, double tol):
    """In-place sweeps; returns ``(iterations_used, max_residual_penetration)``."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef int it = 0
    cdef double res = 0.0
    with nogil:
        while it < iterations:
            it += 1
            for i in range(n):
                for j in range(i + 1, n):
                    _separate(x, y, r, w, i, j)
            _walls(x, y, r, grp, bars, solid, doors, door_ok)
            res = _residual(x, y, r)
            if res <= tol:
                break
    return it, res


def residual(const double[::1] x, const double[::1] y, const double[::1] r):
    return _residual(x, y, r)
