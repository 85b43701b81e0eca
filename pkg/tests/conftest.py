import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evacsim.geom import Vec2  # noqa: E402
from evacsim.model import AgentParams, AgentState, Scenario, SimParams  # noqa: E402
from evacsim.scenarios import LayoutPolicy, build_environment  # noqa: E402

_ACCEPTANCE_LINES = []


def solo_scenario(points, mult=1.0, speed=1.0, sim=None, seed=0, can_fall=False, env=None):
    """Able agents at ``points`` in the four-corner room, nearest exits assigned."""
    from evacsim.behavior import assign_exit
    env = env or build_environment(LayoutPolicy())
    agents = []
    for i, p in enumerate(points):
        m = mult[i] if isinstance(mult, (list, tuple)) else mult
        pos = Vec2(*p)
        params = AgentParams(base_speed=speed, speed_multiplier=m, can_fall=can_fall)
        agents.append(AgentState(i, pos, params, assigned_exit=assign_exit(pos, False, env.exits)))
    return Scenario(env, tuple(agents), sim or SimParams(), seed, "solo")


@pytest.fixture
def acceptance_report():
    def report(number, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
