"""Room layouts, seating placements, experiment presets and the replicate runner."""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import engine
from .behavior import STREAM_CONSTRUCTION, RunRng, assign_exit
from .geom import Segment, Vec2
from .model import (ABLE_MASS, ABLE_RADIUS, BASE_SPEED, DISABLED_MASS, DISABLED_RADIUS,
                    ROOM_HEIGHT, ROOM_WIDTH, Access, AgentParams, AgentState, Environment,
                    ExitOpening, Scenario, SimParams, Termination, Trace, require_valid)

GRID_SIDE = 20
GRID_ORIGIN = 12.0
GRID_SPACING = 4.0
EXIT_WIDTH = 6.0
DEFAULT_DISABLED = 40
DEFAULT_REPLICATES = 5


class Placement(enum.Enum):
    NONE = "none"
    FRONT = "front"
    MIDDLE = "middle"
    RANDOM = "random"


class ExitLayout(enum.Enum):
    FOUR_CORNERS = "four_corners"
    SIX_EXITS = "six_exits"


class Restriction(enum.Enum):
    UNRESTRICTED = "unrestricted"
    SPLIT_ACCESS = "split_access"


@dataclass(frozen=True)
class LayoutPolicy:
    exits: ExitLayout = ExitLayout.FOUR_CORNERS
    restriction: Restriction = Restriction.UNRESTRICTED
    restricted_openings_solid: bool = True

    def __post_init__(self):
        if self.restriction is Restriction.SPLIT_ACCESS and self.exits is not ExitLayout.FOUR_CORNERS:
            raise ValueError("split access is defined for the four-corner layout only")


@dataclass(frozen=True)
class BodyParams:
    radius: float
    mass: float


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to build a scenario; this is what scenario files hold."""

    label: str = ""
    seed: int = 0
    width: float = ROOM_WIDTH
    height: float = ROOM_HEIGHT
    layout: LayoutPolicy = field(default_factory=LayoutPolicy)
    n_total: int = GRID_SIDE * GRID_SIDE
    n_disabled: int = 0
    placement: Placement = Placement.NONE
    able: BodyParams = BodyParams(ABLE_RADIUS, ABLE_MASS)
    disabled: BodyParams = BodyParams(DISABLED_RADIUS, DISABLED_MASS)
    base_speed: float = BASE_SPEED
    sim: SimParams = field(default_factory=SimParams)
    can_fall: bool = False


def grid_positions(n: int) -> list[Vec2]:
    """First ``n`` cells of the 20x20 seating grid; row 0 is the front (low y)."""
    if not 0 <= n <= GRID_SIDE * GRID_SIDE:
        raise ValueError(f"grid holds 0..{GRID_SIDE * GRID_SIDE} agents, got {n}")
    return [Vec2(GRID_ORIGIN + GRID_SPACING * (i % GRID_SIDE),
                 GRID_ORIGIN + GRID_SPACING * (i // GRID_SIDE)) for i in range(n)]


def build_environment(layout: LayoutPolicy, width: float = ROOM_WIDTH,
                      height: float = ROOM_HEIGHT) -> Environment:
    w, h, e = float(width), float(height), EXIT_WIDTH
    segs = [
        Segment(Vec2(0.0, 0.0), Vec2(e, 0.0)),  # 0 bottom-left
        Segment(Vec2(w - e, 0.0), Vec2(w, 0.0)),  # 1 bottom-right
        Segment(Vec2(0.0, h), Vec2(e, h)),  # 2 top-left
        Segment(Vec2(w - e, h), Vec2(w, h)),  # 3 top-right
    ]
    if layout.exits is ExitLayout.SIX_EXITS:
        mid = 0.5 * h
        segs.append(Segment(Vec2(0.0, mid - e / 2), Vec2(0.0, mid + e / 2)))  # 4 left
        segs.append(Segment(Vec2(w, mid - e / 2), Vec2(w, mid + e / 2)))  # 5 right
    access = [Access.ALL] * len(segs)
    if layout.restriction is Restriction.SPLIT_ACCESS:
        access = [Access.DISABLED_ONLY, Access.DISABLED_ONLY, Access.ABLE_ONLY, Access.ABLE_ONLY]
    exits = [ExitOpening(i, s, a) for i, (s, a) in enumerate(zip(segs, access))]
    return Environment.build(w, h, exits, layout.restricted_openings_solid)


def apply_placement(policy: Placement, n_total: int, n_disabled: int, rng: RunRng | None = None):
    """Grid indices of the disabled agents under ``policy``."""
    if not 0 <= n_disabled <= n_total:
        raise ValueError(f"n_disabled={n_disabled} must lie in [0, n_total={n_total}]")
    if policy is Placement.NONE:
        if n_disabled:
            raise ValueError("placement 'none' admits no disabled agents")
        return set()
    if policy is Placement.RANDOM:
        if rng is None:
            raise ValueError("random placement needs a construction rng")
        return set(rng.sample_indices(n_total, n_disabled))
    if n_disabled % GRID_SIDE:
        raise ValueError(f"{policy.value} placement fills whole rows; "
                         f"{n_disabled} is not a multiple of {GRID_SIDE}")
    rows = n_disabled // GRID_SIDE
    first = 0 if policy is Placement.FRONT else (GRID_SIDE - rows) // 2
    idx = set(range(first * GRID_SIDE, (first + rows) * GRID_SIDE))
    if max(idx, default=-1) >= n_total:
        raise ValueError(f"{policy.value} rows exceed the population of {n_total}")
    return idx


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    env = build_environment(cfg.layout, cfg.width, cfg.height)
    rng = RunRng(cfg.seed, STREAM_CONSTRUCTION)
    disabled = apply_placement(cfg.placement, cfg.n_total, cfg.n_disabled, rng)
    agents = []
    for i, pos in enumerate(grid_positions(cfg.n_total)):
        is_dis = i in disabled
        body = cfg.disabled if is_dis else cfg.able
        params = AgentParams(radius=body.radius, mass=body.mass, base_speed=cfg.base_speed,
                             disabled=is_dis, can_fall=cfg.can_fall)
        try:
            target = assign_exit(pos, is_dis, env.exits)
        except ValueError:
            target = -1  # reported by validation
        agents.append(AgentState(i, pos, params, assigned_exit=target))
    return require_valid(Scenario(env, tuple(agents), cfg.sim, cfg.seed, cfg.label))


def _placement_cfg(name, placement, **kw):
    return ScenarioConfig(label=name, n_disabled=DEFAULT_DISABLED, placement=placement, **kw)


_SIX = LayoutPolicy(ExitLayout.SIX_EXITS)
_SPLIT = LayoutPolicy(ExitLayout.FOUR_CORNERS, Restriction.SPLIT_ACCESS)

PRESETS = {
    "control": ScenarioConfig(label="control"),
    **{f"placement_{p.value}": _placement_cfg(f"placement_{p.value}", p)
       for p in (Placement.FRONT, Placement.MIDDLE, Placement.RANDOM)},
    **{f"extra_exits_{p.value}": _placement_cfg(f"extra_exits_{p.value}", p, layout=_SIX)
       for p in (Placement.FRONT, Placement.MIDDLE, Placement.RANDOM)},
    **{f"falling_{p.value}": _placement_cfg(f"falling_{p.value}", p, can_fall=True)
       for p in (Placement.FRONT, Placement.MIDDLE, Placement.RANDOM)},
    "restricted_split": _placement_cfg("restricted_split", Placement.FRONT, layout=_SPLIT),
}


def preset_config(name: str, seed: int = 0) -> ScenarioConfig:
    try:
        cfg = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}") from None
    return replace(cfg, seed=seed)


def preset(name: str, seed: int = 0) -> Scenario:
    return build_scenario(preset_config(name, seed))


@dataclass(frozen=True)
class RunResult:
    run: int
    seed: int
    evac_time: int | None
    last_disabled_exit: int | None
    last_able_exit: int | None
    terminated_by: Termination


@dataclass
class ExperimentSummary:
    condition: str
    runs: list[RunResult]
    traces: list[Trace] = field(default_factory=list, repr=False)

    @property
    def completed(self) -> list[int]:
        return [r.evac_time for r in self.runs if r.terminated_by is Termination.EVACUATED]

    @property
    def step_limited(self) -> list[RunResult]:
        return [r for r in self.runs if r.terminated_by is Termination.STEP_LIMIT]

    @property
    def mean(self) -> float | None:
        c = self.completed
        return sum(c) / len(c) if c else None

    @property
    def min(self) -> int | None:
        return min(self.completed, default=None)

    @property
    def max(self) -> int | None:
        return max(self.completed, default=None)


def default_threads() -> int:
    raw = os.environ.get("EVACSIM_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_config_experiment(cfg: ScenarioConfig, replicates: int = DEFAULT_REPLICATES,
                          base_seed: int = 0, threads: int | None = None) -> ExperimentSummary:
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    seeds = [base_seed + k for k in range(replicates)]
    scenarios = [build_scenario(replace(cfg, seed=s)) for s in seeds]
    workers = min(threads or default_threads(), replicates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(engine.run, scenarios))
    else:
        traces = [engine.run(s) for s in scenarios]
    runs = [RunResult(k, t.seed, engine.evacuation_time(t), t.last_disabled_exit,
                      t.last_able_exit, t.terminated_by) for k, t in enumerate(traces)]
    return ExperimentSummary(cfg.label, runs, traces)


def run_experiment(name: str, replicates: int = DEFAULT_REPLICATES, base_seed: int = 0,
                   threads: int | None = None) -> ExperimentSummary:
    """Run ``replicates`` seeds ``base_seed, base_seed+1, ...`` of a preset."""
    return run_config_experiment(preset_config(name), replicates, base_seed, threads)


def survival_mean(traces: list[Trace]) -> list[tuple[int, float]]:
    """Pointwise mean remaining count; finished traces count as 0 afterwards."""
    if not traces:
        raise ValueError("survival_mean needs at least one trace")
    last = max(t.final_step for t in traces)
    sums = [0] * (last + 1)
    for t in traces:
        for step, remaining, _, _ in t.rows:
            sums[step] += remaining
    return [(s, sums[s] / len(traces)) for s in range(last + 1)]
