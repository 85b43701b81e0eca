"""Agent intent: exit choice, desired velocity, and the fall/recover process."""

from __future__ import annotations

import numpy as np

from .geom import Vec2, normalize, point_segment_distance
from .model import SPEED_JITTER, AgentState, Environment, ExitOpening, Posture

# Fixed labels separating the construction and run streams of one seed.
STREAM_CONSTRUCTION = 0xC0
STREAM_RUN = 0x52


class RunRng:
    """Seeded uniform source backed by numpy's PCG64 (a 64-bit-state generator).

    The seed and a stream label are mixed through ``SeedSequence`` so that the
    construction and run streams of one seed are independent.  Every uniform
    handed out is counted in ``draw_count``.
    """

    def __init__(self, seed: int, stream: int = STREAM_RUN):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed {seed} is not a 64-bit unsigned integer")
        self.seed = seed
        self.stream = stream
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))
        self.draw_count = 0

    def uniform(self) -> float:
        self.draw_count += 1
        return float(self._gen.random())

    def uniforms(self, k: int) -> np.ndarray:
        """``k`` draws; same values as ``k`` successive :meth:`uniform` calls."""
        self.draw_count += k
        return self._gen.random(k)

    def sample_indices(self, n: int, k: int) -> list[int]:
        """``k`` distinct indices from ``range(n)`` by a partial shuffle."""
        idx = list(range(n))
        for i in range(k):
            j = i + int(self.uniform() * (n - i))
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]


def assign_exit(agent_pos: Vec2, disabled: bool, exits) -> int:
    """Nearest accessible exit by point-to-segment distance; lowest index wins ties."""
    best, best_d = -1, float("inf")
    for i, ex in enumerate(exits):
        if not ex.access.allows(disabled):
            continue
        d, _ = point_segment_distance(agent_pos, ex.segment)
        if d < best_d:
            best, best_d = i, d
    if best < 0:
        raise ValueError("no accessible exit")
    return best


def exit_target(pos: Vec2, ex: ExitOpening, midpoint: bool = False) -> Vec2:
    if midpoint:
        return ex.segment.midpoint()
    return point_segment_distance(pos, ex.segment)[1]


def desired_velocity(agent: AgentState, env: Environment, target_midpoint: bool = False,
                     speed_multiplier: float | None = None) -> Vec2:
    if agent.posture is Posture.FALLEN:
        return Vec2(0.0, 0.0)
    m = agent.params.speed_multiplier if speed_multiplier is None else speed_multiplier
    if m is None:
        m = 1.0
    target = exit_target(agent.position, env.exits[agent.assigned_exit], target_midpoint)
    return normalize(target - agent.position) * (agent.params.base_speed * m)


def step_posture(posture: Posture, can_fall: bool, rng: RunRng, p_fall: float,
                 p_recover: float) -> Posture:
    if not can_fall:
        return Posture.STANDING
    return next_posture(posture, rng.uniform(), p_fall, p_recover)


def next_posture(posture: Posture, u: float, p_fall: float, p_recover: float) -> Posture:
    if posture is Posture.STANDING:
        return Posture.FALLEN if u < p_fall else Posture.STANDING
    return Posture.STANDING if u < p_recover else Posture.FALLEN


def multiplier_from_uniform(u: float) -> float:
    return (1.0 - SPEED_JITTER) + 2.0 * SPEED_JITTER * u


def draw_speed_multiplier(rng: RunRng) -> float:
    return multiplier_from_uniform(rng.uniform())
