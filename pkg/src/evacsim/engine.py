"""The simulation loop.

One step runs, in this order:

1. posture draws for active agents that can fall, ascending id;
2. desired velocities for standing active agents;
3. tentative move ``p += v``;
4. contact resolution (pairs, then walls);
5. exit removal, ascending id, stamping ``exited_at`` with the step number;
6. a trace row;
7. the step counter advances.

Row 0 of every trace is the initial population; the first executed step is 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .behavior import STREAM_RUN, RunRng, multiplier_from_uniform
from .geom import point_segment_distance
from .model import (AgentState, Environment, Scenario, Termination, Trace,
                    require_valid)
from .physics import SolverLayout, resolve_all


def should_exit(agent: AgentState, env: Environment) -> bool:
    """True when the agent's centre is within its radius of an opening it may use."""
    r = agent.params.radius
    for ex in env.exits:
        if ex.access.allows(agent.params.disabled):
            d, _ = point_segment_distance(agent.position, ex.segment)
            if d < r:
                return True
    return False


def _segment_distance(px, py, ax, ay, bx, by):
    # Same expression order as geom.point_segment_distance.
    abx = bx - ax
    aby = by - ay
    t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
    t = np.clip(t, 0.0, 1.0)
    qx = ax + t * abx
    qy = ay + t * aby
    dx = px - qx
    dy = py - qy
    return np.sqrt(dx * dx + dy * dy), qx, qy


@dataclass
class SimState:
    step: int
    x: np.ndarray
    y: np.ndarray
    radius: np.ndarray
    inv_mass: np.ndarray
    group: np.ndarray  # int32, 1 = disabled
    speed: np.ndarray  # base_speed * multiplier
    can_fall: np.ndarray
    fallen: np.ndarray
    exit_seg: np.ndarray  # (n, 4) assigned exit segment per agent
    exited_at: np.ndarray  # -1 while active
    rng: RunRng
    layout: SolverLayout
    trace: Trace

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.exited_at < 0)

    def counts(self):
        act = self.exited_at < 0
        dis = int(np.count_nonzero(act & (self.group == 1)))
        tot = int(np.count_nonzero(act))
        return tot, dis, tot - dis


def init_state(scenario: Scenario) -> SimState:
    """Build the run state: seed the run stream and draw one multiplier per agent."""
    agents = scenario.agents
    env = scenario.environment
    n = len(agents)
    rng = RunRng(scenario.seed, STREAM_RUN)
    draws = rng.uniforms(n)
    mult = np.empty(n)
    for k, a in enumerate(agents):
        pinned = a.params.speed_multiplier
        mult[k] = multiplier_from_uniform(float(draws[k])) if pinned is None else pinned
    segs = [env.exits[a.assigned_exit].segment for a in agents]
    state = SimState(
        step=1,
        x=np.array([a.position.x for a in agents], dtype=np.float64),
        y=np.array([a.position.y for a in agents], dtype=np.float64),
        radius=np.array([a.params.radius for a in agents], dtype=np.float64),
        inv_mass=np.array([1.0 / a.params.mass for a in agents], dtype=np.float64),
        group=np.array([int(a.params.disabled) for a in agents], dtype=np.int32),
        speed=np.array([a.params.base_speed for a in agents], dtype=np.float64) * mult,
        can_fall=np.array([a.params.can_fall for a in agents], dtype=bool),
        fallen=np.array([a.posture.value == "fallen" for a in agents], dtype=bool),
        exit_seg=np.array([(s.a.x, s.a.y, s.b.x, s.b.y) for s in segs],
                          dtype=np.float64).reshape(n, 4),
        exited_at=np.full(n, -1, dtype=np.int64),
        rng=rng,
        layout=SolverLayout.from_environment(env),
        trace=Trace(label=scenario.label, seed=scenario.seed),
    )
    state.trace.rows.append((0, *state.counts()))
    return state


def step(state: SimState, scenario: Scenario, backend=None) -> SimState:
    """Advance ``state`` by one step in place and return it."""
    sim = scenario.sim
    act = state.active
    k = state.step

    # 1. posture
    faller = act[state.can_fall[act]]
    if faller.size:
        u = state.rng.uniforms(faller.size)
        was = state.fallen[faller]
        state.fallen[faller] = np.where(was, ~(u < sim.p_recover), u < sim.p_fall)

    # 2-3. desired velocity and tentative move
    mover = act[~state.fallen[act]]
    if mover.size:
        px, py = state.x[mover], state.y[mover]
        seg = state.exit_seg[mover]
        if sim.target_midpoint:
            tx = 0.5 * (seg[:, 0] + seg[:, 2])
            ty = 0.5 * (seg[:, 1] + seg[:, 3])
        else:
            _, tx, ty = _segment_distance(px, py, seg[:, 0], seg[:, 1], seg[:, 2], seg[:, 3])
        dx = tx - px
        dy = ty - py
        norm = np.sqrt(dx * dx + dy * dy)
        safe = np.where(norm == 0.0, 1.0, norm)
        ux = np.where(norm == 0.0, 0.0, dx / safe)
        uy = np.where(norm == 0.0, 0.0, dy / safe)
        sp = state.speed[mover]
        state.x[mover] = px + ux * sp
        state.y[mover] = py + uy * sp

    # 4. contacts
    res = 0.0
    if act.size:
        x = np.ascontiguousarray(state.x[act])
        y = np.ascontiguousarray(state.y[act])
        cr = resolve_all(x, y, np.ascontiguousarray(state.radius[act]),
                         np.ascontiguousarray(state.inv_mass[act]),
                         np.ascontiguousarray(state.group[act]), state.layout,
                         sim.solver_iterations, sim.penetration_tolerance, backend=backend)
        state.x[act] = x
        state.y[act] = y
        res = cr.max_residual_penetration
    state.trace.max_penetration.append(res)

    # 5. exit removal
    if act.size:
        lay = state.layout
        gone = np.zeros(act.size, dtype=bool)
        px, py, r, g = state.x[act], state.y[act], state.radius[act], state.group[act]
        for e in range(lay.doors.shape[0]):
            d, _, _ = _segment_distance(px, py, *lay.doors[e])
            gone |= lay.door_ok[g, e].astype(bool) & (d < r)
        for i in act[gone].tolist():
            state.exited_at[i] = k
            state.trace.exit_times[i] = k

    # 6-7. record and advance
    state.trace.rows.append((k, *state.counts()))
    state.step = k + 1
    return state


def run(scenario: Scenario, backend=None) -> Trace:
    """Validate, then simulate until everyone is out or ``max_steps`` have run."""
    require_valid(scenario)
    state = init_state(scenario)
    max_steps = scenario.sim.max_steps
    while state.trace.rows[-1][1] > 0 and state.step <= max_steps:
        step(state, scenario, backend=backend)
    trace = state.trace
    trace.terminated_by = (Termination.EVACUATED if trace.rows[-1][1] == 0
                           else Termination.STEP_LIMIT)
    for grp, attr in ((1, "last_disabled_exit"), (0, "last_able_exit")):
        members = state.group == grp
        if members.any() and (state.exited_at[members] >= 0).all():
            setattr(trace, attr, int(state.exited_at[members].max()))
    return trace


def evacuation_time(t: Trace) -> int | None:
    """Step at which nobody was left; None for runs cut off by the step limit."""
    if t.terminated_by is Termination.STEP_LIMIT:
        return None
    for row in t.rows:
        if row[1] == 0:
            return row[0]
    return None
