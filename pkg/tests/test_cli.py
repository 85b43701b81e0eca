import csv
import json
import subprocess
import sys

import pytest

from evacsim.cli import main
from evacsim.fileio import (SUMMARY_HEADER, TRACE_HEADER, ScenarioFileError, config_to_dict,
                            dump_scenario, load_scenario, loads_scenario)
from evacsim.scenarios import PRESETS, ScenarioConfig, preset_config


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_simulate_control_first_row(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--preset", "control", "--seed", "1", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == TRACE_HEADER
    assert rows[1] == ["0", "400", "0", "400"]
    assert rows[-1][1] == "0"
    assert len(rows) - 1 == int(rows[-1][0]) + 1
    assert out.read_text().endswith("\n")


def test_simulate_unknown_preset(capsys):
    assert main(["simulate", "--preset", "bogus"]) == 1
    assert "unknown preset" in capsys.readouterr().err


def test_simulate_needs_exactly_one_source():
    with pytest.raises(SystemExit):
        main(["simulate"])
    with pytest.raises(SystemExit):
        main(["simulate", "--preset", "control", "--scenario", "x.json"])


def test_empty_population_file(tmp_path, capsys):
    f = tmp_path / "empty.json"
    f.write_text(json.dumps({"population": {"n_total": 0}}))
    assert main(["simulate", "--scenario", str(f)]) == 0
    assert capsys.readouterr().out == ",".join(TRACE_HEADER) + "\n0,0,0,0\n"


def test_step_limit_exit_status(tmp_path):
    f = tmp_path / "short.json"
    f.write_text(json.dumps({"sim": {"max_steps": 10}}))
    out = tmp_path / "t.csv"
    summ = tmp_path / "s.csv"
    assert main(["simulate", "--scenario", str(f), "--out", str(out), "--summary", str(summ)]) == 2
    rows = _rows(out)
    assert rows[-1][0] == "10" and rows[-1][1] != "0"
    s = _rows(summ)
    assert s[0] == SUMMARY_HEADER
    assert s[1][3] == "" and s[1][6] == "StepLimit"


def test_malformed_json_reports_line(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{\n  "seed": 1,\n}\n')
    assert main(["simulate", "--scenario", str(f)]) == 1
    assert "bad.json:3:" in capsys.readouterr().err


def test_unknown_key_reports_path(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"sim": {"p_fal": 0.1}}))
    assert main(["simulate", "--scenario", str(f)]) == 1
    assert "sim.p_fal: unknown key" in capsys.readouterr().err


def test_validation_error_exit(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"sim": {"p_fall": 3.0}}))
    assert main(["simulate", "--scenario", str(f)]) == 1
    assert "p_fall" in capsys.readouterr().err


@pytest.mark.parametrize("doc, msg", [
    ({"seed": "x"}, "seed: expected an integer"),
    ({"layout": {"exits": "eight"}}, "layout.exits"),
    ({"sim": {"can_fall": 1}}, "sim.can_fall: expected true/false"),
    ({"layout": {"exits": "six_exits", "restriction": "split_access"}}, "layout:"),
    ([], "expected an object"),
])
def test_schema_errors(doc, msg):
    with pytest.raises(ScenarioFileError, match=msg):
        loads_scenario(json.dumps(doc))


def test_missing_keys_take_defaults():
    assert loads_scenario("{}") == ScenarioConfig()


@pytest.mark.parametrize("name", list(PRESETS))
def test_config_round_trip(tmp_path, name):
    cfg = preset_config(name, 12)
    f = tmp_path / "s.json"
    dump_scenario(cfg, f)
    assert load_scenario(f) == cfg
    assert config_to_dict(load_scenario(f)) == json.loads(f.read_text())


def test_file_round_trip_gives_identical_trace(tmp_path):
    f = tmp_path / "s.json"
    dump_scenario(preset_config("falling_random", 5), f)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--scenario", str(f), "--out", str(a)])
    main(["simulate", "--preset", "falling_random", "--seed", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_experiment_file_contract(tmp_path):
    out = tmp_path / "exp"
    rc = main(["experiment", "--preset", "extra_exits_front", "--replicates", "5",
               "--base-seed", "7", "--out-dir", str(out)])
    assert rc == 0
    traces = sorted(p.name for p in out.glob("*_run*_seed*.csv"))
    assert traces == [f"extra_exits_front_run{k}_seed{7 + k}.csv" for k in range(5)]
    summ = _rows(out / "extra_exits_front_summary.csv")
    assert summ[0] == SUMMARY_HEADER
    assert [r[2] for r in summ[1:]] == ["7", "8", "9", "10", "11"]
    for r in summ[1:]:
        assert r[0] == "extra_exits_front" and r[6] == "Evacuated" and r[3].isdigit()


def test_experiment_all(tmp_path):
    rc = main(["experiment", "--all", "--replicates", "1", "--out-dir", str(tmp_path)])
    assert rc == 0
    names = sorted(p.name[: -len("_summary.csv")] for p in tmp_path.glob("*_summary.csv"))
    assert names == sorted(PRESETS)
    assert len(names) == 11


def test_experiment_zero_replicates(tmp_path):
    assert main(["experiment", "--preset", "control", "--replicates", "0",
                 "--out-dir", str(tmp_path)]) == 1


def test_experiment_unknown_preset(tmp_path):
    assert main(["experiment", "--preset", "nope", "--out-dir", str(tmp_path)]) == 1


def _write_trace(path, final, start):
    rows = [(k, start - (start * k) // final, 0, start - (start * k) // final)
            for k in range(final + 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        w.writerows(rows)


def test_plot_single_trace(tmp_path):
    _write_trace(tmp_path / "one.csv", 10, 40)
    svg = tmp_path / "p.svg"
    assert main(["plot", "--traces", str(tmp_path / "*.csv"), "--out", str(svg),
                 "--title", "one"]) == 0
    text = svg.read_text()
    assert text.count("<polyline") == 1
    assert "time step" in text and "agents remaining" in text and ">one<" in text


def test_plot_five_control_traces(tmp_path):
    main(["experiment", "--preset", "control", "--replicates", "5", "--out-dir", str(tmp_path)])
    svg = tmp_path / "c.svg"
    assert main(["plot", "--traces", str(tmp_path / "control_run*.csv"), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.count("<polyline") == 5
    assert ">400<" in text  # y-axis tops out at the initial population
    svg2 = tmp_path / "c2.svg"
    main(["plot", "--traces", str(tmp_path / "control_run*.csv"), "--out", str(svg2)])
    assert svg.read_bytes() == svg2.read_bytes()


def test_plot_no_match(tmp_path):
    assert main(["plot", "--traces", str(tmp_path / "none*.csv"), "--out",
                 str(tmp_path / "x.svg")]) == 1


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    assert capsys.readouterr().out.split() == list(PRESETS)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "evacsim", "list-presets"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "control" in r.stdout
