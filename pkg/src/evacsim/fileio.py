"""Scenario JSON files and the trace/summary CSV formats."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields, replace

from .engine import evacuation_time
from .model import Trace
from .scenarios import (BodyParams, ExitLayout, ExperimentSummary, LayoutPolicy, Placement,
                        Restriction, ScenarioConfig)

TRACE_HEADER = ["step", "remaining_total", "remaining_disabled", "remaining_able"]
SUMMARY_HEADER = ["condition", "run", "seed", "evac_time", "last_disabled_exit",
                  "last_able_exit", "terminated_by"]


class ScenarioFileError(ValueError):
    pass


_SCHEMA = {
    "label": str,
    "seed": int,
    "room": {"width": float, "height": float},
    "layout": {"exits": ExitLayout, "restriction": Restriction,
               "restricted_openings_solid": bool},
    "population": {"n_total": int, "n_disabled": int, "placement": Placement},
    "bodies": {"able": {"radius": float, "mass": float},
               "disabled": {"radius": float, "mass": float},
               "base_speed": float},
    "sim": {"p_fall": float, "p_recover": float, "max_steps": int, "solver_iterations": int,
            "penetration_tolerance": float, "target_midpoint": bool, "can_fall": bool},
}


def _check(value, schema, path):
    """Type-check ``value`` against ``schema``; returns the coerced value."""
    where = path or "<root>"
    if isinstance(schema, dict):
        if not isinstance(value, dict):
            raise ScenarioFileError(f"{where}: expected an object")
        out = {}
        for key, sub in value.items():
            full = f"{path}.{key}" if path else key
            if key not in schema:
                raise ScenarioFileError(f"{full}: unknown key")
            out[key] = _check(sub, schema[key], full)
        return out
    if schema is bool:
        if not isinstance(value, bool):
            raise ScenarioFileError(f"{where}: expected true/false, got {value!r}")
        return value
    if schema is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioFileError(f"{where}: expected an integer, got {value!r}")
        return value
    if schema is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioFileError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if schema is str:
        if not isinstance(value, str):
            raise ScenarioFileError(f"{where}: expected a string, got {value!r}")
        return value
    try:
        return schema(value)
    except ValueError:
        choices = ", ".join(m.value for m in schema)
        raise ScenarioFileError(f"{where}: {value!r} is not one of {choices}") from None


def config_from_dict(doc: dict) -> ScenarioConfig:
    d = _check(doc, _SCHEMA, "")
    base = ScenarioConfig()
    room = d.get("room", {})
    lay = d.get("layout", {})
    pop = d.get("population", {})
    bodies = d.get("bodies", {})
    sim = dict(d.get("sim", {}))
    can_fall = sim.pop("can_fall", base.can_fall)
    try:
        layout = LayoutPolicy(
            exits=lay.get("exits", base.layout.exits),
            restriction=lay.get("restriction", base.layout.restriction),
            restricted_openings_solid=lay.get("restricted_openings_solid",
                                              base.layout.restricted_openings_solid),
        )
    except ValueError as e:
        raise ScenarioFileError(f"layout: {e}") from None
    return ScenarioConfig(
        label=d.get("label", base.label),
        seed=d.get("seed", base.seed),
        width=room.get("width", base.width),
        height=room.get("height", base.height),
        layout=layout,
        n_total=pop.get("n_total", base.n_total),
        n_disabled=pop.get("n_disabled", base.n_disabled),
        placement=pop.get("placement", base.placement),
        able=BodyParams(**{**vars_of(base.able), **bodies.get("able", {})}),
        disabled=BodyParams(**{**vars_of(base.disabled), **bodies.get("disabled", {})}),
        base_speed=bodies.get("base_speed", base.base_speed),
        sim=replace(base.sim, **sim),
        can_fall=can_fall,
    )


def vars_of(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    sim = vars_of(cfg.sim)
    sim["can_fall"] = cfg.can_fall
    return {
        "label": cfg.label,
        "seed": cfg.seed,
        "room": {"width": cfg.width, "height": cfg.height},
        "layout": {"exits": cfg.layout.exits.value, "restriction": cfg.layout.restriction.value,
                   "restricted_openings_solid": cfg.layout.restricted_openings_solid},
        "population": {"n_total": cfg.n_total, "n_disabled": cfg.n_disabled,
                       "placement": cfg.placement.value},
        "bodies": {"able": vars_of(cfg.able), "disabled": vars_of(cfg.disabled),
                   "base_speed": cfg.base_speed},
        "sim": sim,
    }


def loads_scenario(text: str, source: str = "<string>") -> ScenarioConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFileError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        return config_from_dict(doc)
    except ScenarioFileError as e:
        raise ScenarioFileError(f"{source}: {e}") from None


def load_scenario(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return loads_scenario(fh.read(), str(path))


def dump_scenario(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2)
        fh.write("\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: Trace) -> str:
    return _csv_text(TRACE_HEADER, trace.rows)


def write_trace_csv(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv(trace))


def read_trace_csv(path) -> list[tuple[int, int, int, int]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: not a trace file (header {header!r})")
        return [tuple(int(v) for v in row) for row in reader]


def _blank(v):
    return "" if v is None else v


def summary_rows(condition: str, traces: list[Trace]):
    for k, t in enumerate(traces):
        yield (condition, k, t.seed, _blank(evacuation_time(t)), _blank(t.last_disabled_exit),
               _blank(t.last_able_exit), t.terminated_by.value)


def summary_csv(summary: ExperimentSummary) -> str:
    rows = [(summary.condition, r.run, r.seed, _blank(r.evac_time),
             _blank(r.last_disabled_exit), _blank(r.last_able_exit), r.terminated_by.value)
            for r in summary.runs]
    return _csv_text(SUMMARY_HEADER, rows)


def trace_summary_csv(condition: str, trace: Trace) -> str:
    return _csv_text(SUMMARY_HEADER, summary_rows(condition, [trace]))

