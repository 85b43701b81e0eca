"""Position-based contact resolution: no overlap between agents, no wall crossing.

Contacts only move positions; there is no velocity state, so resolved
contacts leave nothing behind that could push agents apart later.

The sweep kernel comes from the compiled ``_solver`` extension when it is
importable and from ``_solver_py`` otherwise.  ``EVACSIM_BACKEND`` set to
``python`` or ``compiled`` forces the choice.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _solver_py
from .geom import Vec2
from .model import AgentState, Environment

try:
    from . import _solver as _solver_c
except ImportError:  # pragma: no cover - depends on the build
    _solver_c = None

GROUPS = 2  # 0 = able, 1 = disabled


def _pick_backend():
    want = os.environ.get("EVACSIM_BACKEND", "auto").lower()
    if want == "python":
        return "python", _solver_py
    if want == "compiled" and _solver_c is None:
        raise ImportError("EVACSIM_BACKEND=compiled but evacsim._solver is not built")
    if _solver_c is not None:
        return "compiled", _solver_c
    return "python", _solver_py


BACKEND, _kernel = _pick_backend()


def get_kernel(name=None):
    """Return the solver module for ``name`` (``"python"``/``"compiled"``) or the active one."""
    if name is None:
        return _kernel
    if name == "python":
        return _solver_py
    if name == "compiled":
        if _solver_c is None:
            raise ImportError("compiled solver not available")
        return _solver_c
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class ContactResolution:
    iterations_used: int
    max_residual_penetration: float


def separate_pair(pos_i: Vec2, pos_j: Vec2, r_i: float, r_j: float, m_i: float, m_j: float):
    """Push two overlapping discs apart to exact contact.

    The overlap is split by inverse mass.  Coincident centres separate along
    +x (``i`` to the left, ``j`` to the right).
    """
    dx = pos_j.x - pos_i.x
    dy = pos_j.y - pos_i.y
    rs = r_i + r_j
    d2 = dx * dx + dy * dy
    if not d2 < rs * rs:
        return pos_i, pos_j
    d = math.sqrt(d2)
    if d > 0.0:
        nx, ny = dx / d, dy / d
    else:
        nx, ny = 1.0, 0.0
    overlap = rs - d
    wi, wj = 1.0 / m_i, 1.0 / m_j
    wsum = wi + wj
    ci = overlap * wi / wsum
    cj = overlap * wj / wsum
    return (
        Vec2(pos_i.x - nx * ci, pos_i.y - ny * ci),
        Vec2(pos_j.x + nx * cj, pos_j.y + ny * cj),
    )


@dataclass(frozen=True)
class SolverLayout:
    """Environment packed into the flat arrays the kernels consume.

    ``bars`` rows are ``(ax, ay, bx, by, nx, ny)``: wall segments first, then
    every exit opening.  ``solid[g, b]`` says whether barrier ``b`` blocks
    group ``g``; ``door_ok[g, e]`` whether group ``g`` may leave through exit ``e``.
    """

    bars: np.ndarray
    solid: np.ndarray
    doors: np.ndarray
    door_ok: np.ndarray

    @classmethod
    def from_environment(cls, env: Environment) -> SolverLayout:
        rows = []
        solid = []
        for w in env.wall_segments:
            s = w.segment
            rows.append((s.a.x, s.a.y, s.b.x, s.b.y, w.normal.x, w.normal.y))
            solid.append((1, 1))
        doors = []
        door_ok = []
        for ex in env.exits:
            s = ex.segment
            n = env.inward_normal(s)
            rows.append((s.a.x, s.a.y, s.b.x, s.b.y, n.x, n.y))
            ok = tuple(int(ex.access.allows(bool(g))) for g in range(GROUPS))
            blocks = tuple(int(env.restricted_openings_solid and not o) for o in ok)
            solid.append(blocks)
            doors.append((s.a.x, s.a.y, s.b.x, s.b.y))
            door_ok.append(ok)
        bars = np.array(rows, dtype=np.float64).reshape(-1, 6)
        return cls(
            bars=np.ascontiguousarray(bars),
            solid=np.ascontiguousarray(np.array(solid, dtype=np.uint8).reshape(-1, GROUPS).T),
            doors=np.ascontiguousarray(np.array(doors, dtype=np.float64).reshape(-1, 4)),
            door_ok=np.ascontiguousarray(np.array(door_ok, dtype=np.uint8).reshape(-1, GROUPS).T),
        )


def project_from_walls(agent: AgentState, env: Environment, layout: SolverLayout | None = None) -> Vec2:
    """Move one agent out of every wall that is solid for it.

    Agents whose disc already reaches an opening they may use are in the
    doorway and are left alone; the exit check removes them this step.
    """
    layout = layout or SolverLayout.from_environment(env)
    x = np.array([agent.position.x])
    y = np.array([agent.position.y])
    r = np.array([agent.params.radius])
    grp = np.array([int(agent.params.disabled)], dtype=np.int32)
    _solver_py._walls(x, y, r, grp, layout.bars, layout.solid, layout.doors, layout.door_ok)
    return Vec2(float(x[0]), float(y[0]))


def resolve_all(x, y, radius, inv_mass, group, layout: SolverLayout, iterations=8, tol=0.01,
                backend=None) -> ContactResolution:
    """Resolve all contacts in place on the ``x``/``y`` position buffers.

    Each sweep applies every pair (i < j, lexicographic) then every agent's
    wall projection in id order, and stops early once the worst pairwise
    penetration is within ``tol``.
    """
    kern = get_kernel(backend)
    it, res = kern.resolve(x, y, radius, inv_mass, group, layout.bars, layout.solid,
                           layout.doors, layout.door_ok, int(iterations), float(tol))
    return ContactResolution(int(it), float(res))


def max_penetration(x, y, radius) -> float:
    return float(_kernel.residual(x, y, radius))
