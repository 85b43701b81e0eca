"""Domain types: agents, room, exits, run parameters, scenarios and traces."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geom import GeometryError, Segment, Vec2, point_segment_distance

# Body defaults.  Only the relations (disabled bodies are larger and heavier,
# speeds within +-5%) come from the modelled experiments; magnitudes are ours.
ABLE_RADIUS = 1.0
ABLE_MASS = 1.0
DISABLED_RADIUS = 1.5
DISABLED_MASS = 2.5
BASE_SPEED = 0.75
SPEED_JITTER = 0.05

ROOM_WIDTH = 100.0
ROOM_HEIGHT = 100.0

TILING_TOL = 1e-9


class Posture(enum.Enum):
    STANDING = "standing"
    FALLEN = "fallen"


class Access(enum.Enum):
    ALL = "all"
    DISABLED_ONLY = "disabled_only"
    ABLE_ONLY = "able_only"

    def allows(self, disabled: bool) -> bool:
        if self is Access.ALL:
            return True
        return disabled == (self is Access.DISABLED_ONLY)


class Termination(enum.Enum):
    EVACUATED = "Evacuated"
    STEP_LIMIT = "StepLimit"


class ValidationError(ValueError):
    """Raised when a scenario violates one or more invariants."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class AgentParams:
    radius: float = ABLE_RADIUS
    mass: float = ABLE_MASS
    base_speed: float = BASE_SPEED
    # None: drawn from the run stream at start-up.  A value pins it, but the
    # draw is still consumed so stream alignment does not depend on pinning.
    speed_multiplier: float | None = None
    disabled: bool = False
    can_fall: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.base_speed >= 0:
            raise ValueError(f"base_speed must be non-negative, got {self.base_speed}")
        m = self.speed_multiplier
        if m is not None and not (1 - SPEED_JITTER <= m <= 1 + SPEED_JITTER):
            raise ValueError(f"speed_multiplier {m} outside [0.95, 1.05]")


@dataclass(frozen=True)
class AgentState:
    id: int
    position: Vec2
    params: AgentParams
    posture: Posture = Posture.STANDING
    assigned_exit: int = -1
    exited_at: int | None = None


@dataclass(frozen=True)
class ExitOpening:
    id: int
    segment: Segment
    access: Access = Access.ALL


@dataclass(frozen=True)
class WallSegment:
    """A solid stretch of boundary with its unit normal pointing into the room."""

    segment: Segment
    normal: Vec2


def _sides(width, height):
    # Counter-clockwise, so the inward normal is the left perpendicular.
    return [
        (Vec2(0.0, 0.0), Vec2(width, 0.0), Vec2(0.0, 1.0)),
        (Vec2(width, 0.0), Vec2(width, height), Vec2(-1.0, 0.0)),
        (Vec2(width, height), Vec2(0.0, height), Vec2(0.0, -1.0)),
        (Vec2(0.0, height), Vec2(0.0, 0.0), Vec2(1.0, 0.0)),
    ]


def _side_param(p: Vec2, a: Vec2, b: Vec2, tol=1e-9):
    """Arc-length position of ``p`` along side ``a->b``, or None if off it."""
    dist, _ = point_segment_distance(p, Segment(a, b))
    if dist > tol:
        return None
    return (p - a).norm()


def locate_on_boundary(seg: Segment, width: float, height: float):
    """Return ``(side_index, start, end)`` for a segment lying on one room side."""
    for k, (a, b, _) in enumerate(_sides(width, height)):
        s0 = _side_param(seg.a, a, b)
        s1 = _side_param(seg.b, a, b)
        if s0 is not None and s1 is not None:
            return k, min(s0, s1), max(s0, s1)
    raise GeometryError(f"segment {seg} does not lie on a single room wall")


@dataclass(frozen=True)
class Environment:
    width: float
    height: float
    exits: tuple[ExitOpening, ...]
    wall_segments: tuple[WallSegment, ...]
    restricted_openings_solid: bool = True

    @classmethod
    def build(cls, width, height, exits, restricted_openings_solid=True):
        """Construct a room whose walls are the boundary minus ``exits``."""
        width = float(width)
        height = float(height)
        if not (width > 0 and height > 0):
            raise GeometryError("room dimensions must be positive")
        sides = _sides(width, height)
        cuts = [[] for _ in sides]
        oriented = []
        for ex in exits:
            k, s0, s1 = locate_on_boundary(ex.segment, width, height)
            cuts[k].append((s0, s1, ex.id))
            a, b, _ = sides[k]
            u = (b - a) * (1.0 / (b - a).norm())
            seg = Segment(a + u * s0, a + u * s1)
            oriented.append(ExitOpening(ex.id, seg, ex.access))
        walls = []
        for k, (a, b, n) in enumerate(sides):
            length = (b - a).norm()
            u = (b - a) * (1.0 / length)
            pos = 0.0
            for s0, s1, eid in sorted(cuts[k]):
                if s0 < pos - TILING_TOL:
                    raise GeometryError(f"exit {eid} overlaps another opening")
                if s0 - pos > TILING_TOL:
                    walls.append(WallSegment(Segment(a + u * pos, a + u * s0), n))
                pos = s1
            if length - pos > TILING_TOL:
                walls.append(WallSegment(Segment(a + u * pos, b), n))
        return cls(width, height, tuple(oriented), tuple(walls), restricted_openings_solid)

    def inward_normal(self, seg: Segment) -> Vec2:
        k, _, _ = locate_on_boundary(seg, self.width, self.height)
        return _sides(self.width, self.height)[k][2]

    def accessible_exits(self, disabled: bool) -> list[int]:
        return [i for i, ex in enumerate(self.exits) if ex.access.allows(disabled)]

    def effective_walls(self, disabled: bool) -> list[WallSegment]:
        """Solid boundary for one group: walls plus openings it may not use."""
        walls = list(self.wall_segments)
        if self.restricted_openings_solid:
            for ex in self.exits:
                if not ex.access.allows(disabled):
                    walls.append(WallSegment(ex.segment, self.inward_normal(ex.segment)))
        return walls


@dataclass(frozen=True)
class SimParams:
    p_fall: float = 0.001
    p_recover: float = 0.01
    max_steps: int = 10000
    solver_iterations: int = 500
    penetration_tolerance: float = 0.01
    target_midpoint: bool = False

    def problems(self):
        out = []
        for name in ("p_fall", "p_recover"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"{name} must lie in [0, 1], got {v}")
        if self.max_steps < 1:
            out.append(f"max_steps must be >= 1, got {self.max_steps}")
        if self.solver_iterations < 1:
            out.append(f"solver_iterations must be >= 1, got {self.solver_iterations}")
        if not self.penetration_tolerance >= 0:
            out.append("penetration_tolerance must be non-negative")
        return out


@dataclass(frozen=True)
class Scenario:
    environment: Environment
    agents: tuple[AgentState, ...]
    sim: SimParams = field(default_factory=SimParams)
    seed: int = 0
    label: str = ""


@dataclass
class Trace:
    label: str
    seed: int
    rows: list[tuple[int, int, int, int]] = field(default_factory=list)
    exit_times: dict[int, int] = field(default_factory=dict)
    terminated_by: Termination = Termination.EVACUATED
    # Max pairwise penetration after each executed step (diagnostic).
    max_penetration: list[float] = field(default_factory=list)
    last_disabled_exit: int | None = None
    last_able_exit: int | None = None

    @property
    def final_step(self) -> int:
        return self.rows[-1][0]


def validate_scenario(s: Scenario) -> list[str]:
    """Return every violated scenario invariant; an empty list means valid."""
    errors = []
    env = s.environment
    errors.extend(s.sim.problems())

    if not 0 <= s.seed < 2**64:
        errors.append(f"seed {s.seed} is not a 64-bit unsigned integer")

    perimeter = 2.0 * (env.width + env.height)
    covered = sum(w.segment.length() for w in env.wall_segments)
    covered += sum(ex.segment.length() for ex in env.exits)
    if abs(covered - perimeter) > TILING_TOL:
        errors.append(f"malformed boundary tiling: {covered} != {perimeter}")
    for i, ex in enumerate(env.exits):
        if ex.id != i:
            errors.append(f"exit at index {i} has id {ex.id}")

    agents = s.agents
    for i, a in enumerate(agents):
        if a.id != i:
            errors.append(f"agent at index {i} has id {a.id}")
        if a.exited_at is not None:
            errors.append(f"agent {a.id} starts already exited")
        acc = env.accessible_exits(a.params.disabled)
        if not acc:
            errors.append(f"agent {a.id}: no accessible exit")
        elif a.assigned_exit not in acc:
            errors.append(f"agent {a.id}: assigned exit {a.assigned_exit} is not accessible")
        p, r = a.position, a.params.radius
        if not (0.0 < p.x < env.width and 0.0 < p.y < env.height):
            errors.append(f"agent {a.id}: position {tuple(p)} outside the room")
            continue
        for w in env.effective_walls(a.params.disabled):
            d, _ = point_segment_distance(p, w.segment)
            if d < r:
                errors.append(f"agent {a.id}: wall clearance {d:.6g} < radius {r}")
                break

    if len(agents) > 1:
        xy = np.array([[a.position.x, a.position.y] for a in agents])
        rad = np.array([a.params.radius for a in agents])
        diff = xy[:, None, :] - xy[None, :, :]
        d = np.sqrt((diff**2).sum(-1))
        rsum = rad[:, None] + rad[None, :]
        ii, jj = np.nonzero(np.triu(d < rsum, k=1))
        for i, j in zip(ii.tolist(), jj.tolist()):
            errors.append(f"agents {i} and {j}: initial overlap")
    return errors


def require_valid(s: Scenario) -> Scenario:
    errors = validate_scenario(s)
    if errors:
        raise ValidationError(errors)
    return s
