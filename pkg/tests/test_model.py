from dataclasses import replace

import pytest

from evacsim.geom import GeometryError, Segment, Vec2
from evacsim.model import (Access, AgentParams, AgentState, Environment, ExitOpening, Scenario,
                           SimParams, validate_scenario)
from evacsim.scenarios import (ExitLayout, LayoutPolicy, PRESETS, Restriction, build_environment,
                               preset)


def _tiled_length(env):
    return (sum(w.segment.length() for w in env.wall_segments)
            + sum(e.segment.length() for e in env.exits))


@pytest.mark.parametrize("layout", [
    LayoutPolicy(),
    LayoutPolicy(ExitLayout.SIX_EXITS),
    LayoutPolicy(ExitLayout.FOUR_CORNERS, Restriction.SPLIT_ACCESS),
])
def test_boundary_tiling(layout):
    env = build_environment(layout)
    assert _tiled_length(env) == pytest.approx(400.0, abs=1e-9)


def test_wall_normals_point_inward():
    env = build_environment(LayoutPolicy(ExitLayout.SIX_EXITS))
    centre = Vec2(50, 50)
    for w in env.wall_segments:
        mid = w.segment.midpoint()
        assert (centre - mid).dot(w.normal) > 0


def test_overlapping_openings_rejected():
    exits = [ExitOpening(0, Segment(Vec2(0, 0), Vec2(6, 0))),
             ExitOpening(1, Segment(Vec2(4, 0), Vec2(10, 0)))]
    with pytest.raises(GeometryError):
        Environment.build(100, 100, exits)


def test_opening_off_the_boundary_rejected():
    with pytest.raises(GeometryError):
        Environment.build(100, 100, [ExitOpening(0, Segment(Vec2(5, 5), Vec2(10, 5)))])


def test_agent_params_invariants():
    with pytest.raises(ValueError):
        AgentParams(radius=0)
    with pytest.raises(ValueError):
        AgentParams(mass=-1)
    with pytest.raises(ValueError):
        AgentParams(speed_multiplier=1.2)
    AgentParams(speed_multiplier=0.95)
    AgentParams(speed_multiplier=1.05)


def test_access_masks():
    assert Access.ALL.allows(True) and Access.ALL.allows(False)
    assert Access.DISABLED_ONLY.allows(True) and not Access.DISABLED_ONLY.allows(False)
    assert Access.ABLE_ONLY.allows(False) and not Access.ABLE_ONLY.allows(True)


def test_control_preset_validates():
    assert validate_scenario(preset("control", 0)) == []


@pytest.mark.parametrize("name", list(PRESETS))
def test_every_preset_validates(name):
    assert validate_scenario(preset(name, 3)) == []


def _two_agents(p0, p1, disabled=False, env=None):
    env = env or build_environment(LayoutPolicy())
    ps = AgentParams(disabled=disabled)
    return Scenario(env, (AgentState(0, p0, ps, assigned_exit=0),
                          AgentState(1, p1, ps, assigned_exit=0)))


def test_identical_positions_reported_as_overlap():
    errs = validate_scenario(_two_agents(Vec2(30, 30), Vec2(30, 30)))
    assert any("initial overlap" in e for e in errs)


def test_touching_agents_are_not_overlapping():
    assert validate_scenario(_two_agents(Vec2(30, 30), Vec2(32, 30))) == []


def test_no_accessible_exit_reported():
    env = Environment.build(100, 100, [
        ExitOpening(0, Segment(Vec2(0, 0), Vec2(6, 0)), Access.ABLE_ONLY),
        ExitOpening(1, Segment(Vec2(94, 100), Vec2(100, 100)), Access.ABLE_ONLY),
    ])
    errs = validate_scenario(_two_agents(Vec2(30, 30), Vec2(40, 30), disabled=True, env=env))
    assert sum("no accessible exit" in e for e in errs) == 2


def test_wall_clearance_and_bad_params_reported():
    s = _two_agents(Vec2(0.5, 30), Vec2(40, 30))
    s = replace(s, sim=SimParams(p_fall=2.0, max_steps=0))
    errs = validate_scenario(s)
    assert any("wall clearance" in e for e in errs)
    assert any("p_fall" in e for e in errs)
    assert any("max_steps" in e for e in errs)


def test_errors_are_collected_not_raised():
    s = _two_agents(Vec2(30, 30), Vec2(30, 30))
    s = replace(s, seed=-1)
    errs = validate_scenario(s)
    assert len(errs) >= 2
