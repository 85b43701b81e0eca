"""Planar vector and segment primitives.

All arithmetic is double precision.  The formulas here are mirrored
operation-for-operation by the solver kernels so that both backends agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite vector ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class Segment:
    a: Vec2
    b: Vec2

    def __post_init__(self):
        d = self.b - self.a
        # squared length is the projection denominator; it can underflow to 0
        if d.x * d.x + d.y * d.y == 0.0:
            raise GeometryError(f"degenerate segment at {self.a}")

    def length(self) -> float:
        return (self.b - self.a).norm()

    def midpoint(self) -> Vec2:
        return Vec2(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))


def closest_point(p: Vec2, s: Segment) -> Vec2:
    abx = s.b.x - s.a.x
    aby = s.b.y - s.a.y
    t = ((p.x - s.a.x) * abx + (p.y - s.a.y) * aby) / (abx * abx + aby * aby)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return Vec2(s.a.x + t * abx, s.a.y + t * aby)


def point_segment_distance(p: Vec2, s: Segment) -> tuple[float, Vec2]:
    """Return ``(distance, closest_point)`` from ``p`` to segment ``s``."""
    q = closest_point(p, s)
    dx = p.x - q.x
    dy = p.y - q.y
    return math.sqrt(dx * dx + dy * dy), q


def normalize(v: Vec2) -> Vec2:
    """Unit vector along ``v``; the zero vector maps to itself."""
    n = math.sqrt(v.x * v.x + v.y * v.y)
    if n == 0.0:
        return Vec2(0.0, 0.0)
    return Vec2(v.x / n, v.y / n)
