from dataclasses import replace

import pytest

from evacsim.behavior import STREAM_CONSTRUCTION, RunRng
from evacsim.engine import run
from evacsim.geom import point_segment_distance
from evacsim.model import Access, Termination, Trace
from evacsim.scenarios import (ExitLayout, LayoutPolicy, Placement, Restriction, apply_placement,
                               build_environment, grid_positions, preset, preset_config,
                               run_experiment, survival_mean)


@pytest.mark.parametrize("i, xy", [(0, (12, 12)), (21, (16, 16)), (399, (88, 88))])
def test_grid_cells(i, xy):
    p = grid_positions(400)[i]
    assert (p.x, p.y) == xy


def test_grid_bounds():
    with pytest.raises(ValueError):
        grid_positions(401)
    assert grid_positions(0) == []


def test_grid_clearance_for_disabled_bodies():
    env = build_environment(LayoutPolicy(ExitLayout.SIX_EXITS))
    pts = grid_positions(400)
    for p in pts:
        for w in env.wall_segments:
            assert point_segment_distance(p, w.segment)[0] >= 1.5
    gaps = [(a - b).norm() for k, a in enumerate(pts) for b in pts[k + 1:]]
    assert min(gaps) >= 3.0


def _lengths(env):
    return (sum(w.segment.length() for w in env.wall_segments),
            sum(e.segment.length() for e in env.exits))


def test_four_corner_environment():
    env = build_environment(LayoutPolicy())
    assert len(env.exits) == 4
    walls, openings = _lengths(env)
    assert openings == pytest.approx(24) and walls == pytest.approx(376)


def test_six_exit_environment():
    env = build_environment(LayoutPolicy(ExitLayout.SIX_EXITS))
    assert len(env.exits) == 6
    assert _lengths(env)[0] == pytest.approx(364)
    left, right = env.exits[4].segment, env.exits[5].segment
    assert {left.a.x, left.b.x} == {0.0} and sorted((left.a.y, left.b.y)) == [47, 53]
    assert {right.a.x, right.b.x} == {100.0} and sorted((right.a.y, right.b.y)) == [47, 53]


def test_split_access_masks():
    env = build_environment(LayoutPolicy(ExitLayout.FOUR_CORNERS, Restriction.SPLIT_ACCESS))
    assert [e.access for e in env.exits] == [Access.DISABLED_ONLY, Access.DISABLED_ONLY,
                                             Access.ABLE_ONLY, Access.ABLE_ONLY]
    # top pair is the able-only pair
    assert all(e.segment.a.y == 100 for e in env.exits[2:])


def test_split_needs_four_corners():
    with pytest.raises(ValueError):
        LayoutPolicy(ExitLayout.SIX_EXITS, Restriction.SPLIT_ACCESS)


def test_placements():
    assert apply_placement(Placement.FRONT, 400, 40) == set(range(40))
    assert apply_placement(Placement.MIDDLE, 400, 40) == set(range(180, 220))
    assert apply_placement(Placement.NONE, 400, 0) == set()
    r1 = apply_placement(Placement.RANDOM, 400, 40, RunRng(5, STREAM_CONSTRUCTION))
    r2 = apply_placement(Placement.RANDOM, 400, 40, RunRng(5, STREAM_CONSTRUCTION))
    r3 = apply_placement(Placement.RANDOM, 400, 40, RunRng(6, STREAM_CONSTRUCTION))
    assert r1 == r2 and len(r1) == 40 and all(0 <= i < 400 for i in r1)
    assert r1 != r3


def test_placement_errors():
    with pytest.raises(ValueError):
        apply_placement(Placement.FRONT, 400, 30)
    with pytest.raises(ValueError):
        apply_placement(Placement.MIDDLE, 400, 401)
    with pytest.raises(ValueError):
        apply_placement(Placement.NONE, 400, 5)


def test_control_preset():
    s = preset("control", 0)
    assert len(s.agents) == 400 and len(s.environment.exits) == 4
    assert not any(a.params.disabled for a in s.agents)
    assert not any(a.params.can_fall for a in s.agents)


def test_falling_preset_probabilities():
    s = preset("falling_front", 0)
    assert s.sim.p_fall == 0.001 and s.sim.p_recover == 0.01
    assert all(a.params.can_fall for a in s.agents)


def test_extra_exits_middle_preset():
    s = preset("extra_exits_middle", 0)
    assert len(s.environment.exits) == 6
    assert {a.id for a in s.agents if a.params.disabled} == set(range(180, 220))


def test_restricted_split_preset():
    s = preset("restricted_split", 0)
    assert {a.id for a in s.agents if a.params.disabled} == set(range(40))
    for a in s.agents:
        assert s.environment.exits[a.assigned_exit].access.allows(a.params.disabled)


def test_unknown_preset():
    with pytest.raises(KeyError, match="unknown preset"):
        preset("bogus")


def test_placements_share_everything_but_disabled_set():
    a, b = preset("placement_front", 9), preset("placement_random", 9)
    assert [x.position for x in a.agents] == [x.position for x in b.agents]
    assert a.environment == b.environment and a.sim == b.sim and a.seed == b.seed


def _trace(final, start=4):
    rows = [(k, max(start - k * start // final, 0), 0, max(start - k * start // final, 0))
            for k in range(final + 1)]
    rows[-1] = (final, 0, 0, 0)
    return Trace("t", 0, rows)


def test_survival_mean_single_and_identical():
    t = _trace(10)
    assert survival_mean([t]) == [(k, float(r)) for k, r, _, _ in t.rows]
    assert survival_mean([t, t]) == survival_mean([t])


def test_survival_mean_padding():
    a, b = _trace(10), _trace(20)
    curve = survival_mean([a, b])
    assert len(curve) == 21 and curve[-1][0] == 20
    for k in range(11, 21):
        assert curve[k] == (k, b.rows[k][1] / 2)


def test_survival_mean_empty():
    with pytest.raises(ValueError):
        survival_mean([])


def test_run_experiment_single_replicate():
    s = run_experiment("extra_exits_front", replicates=1, base_seed=3)
    assert len(s.runs) == 1 and s.runs[0].seed == 3
    assert s.mean == s.runs[0].evac_time


def test_run_experiment_rejects_zero_replicates():
    with pytest.raises(ValueError):
        run_experiment("control", replicates=0)


def test_run_experiment_threads_do_not_change_results():
    a = run_experiment("extra_exits_random", replicates=3, base_seed=1, threads=1)
    b = run_experiment("extra_exits_random", replicates=3, base_seed=1, threads=3)
    assert a.runs == b.runs
    assert [r.seed for r in a.runs] == [1, 2, 3]


def test_summary_excludes_step_limited_runs():
    from evacsim.scenarios import run_config_experiment
    cfg = preset_config("control")
    cfg = replace(cfg, sim=replace(cfg.sim, max_steps=20))
    s = run_config_experiment(cfg, replicates=2)
    assert all(r.terminated_by is Termination.STEP_LIMIT for r in s.runs)
    assert s.mean is None and s.completed == [] and len(s.step_limited) == 2


def test_paired_runs_are_comparable():
    a = run(preset("placement_front", 2))
    b = run(preset("restricted_split", 2))
    assert a.seed == b.seed and a.rows[0] == b.rows[0]
