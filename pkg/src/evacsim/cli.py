"""Command-line front end: ``simulate``, ``experiment``, ``plot``, ``list-presets``.

Exit status: 0 when every run evacuated, 2 when any run hit the step limit,
1 for invalid input.
"""

from __future__ import annotations

import argparse
import glob
import sys
from dataclasses import replace
from pathlib import Path

from . import engine
from .fileio import (ScenarioFileError, load_scenario, read_trace_csv, summary_csv,
                     trace_csv, trace_summary_csv, write_trace_csv)
from .model import Termination, ValidationError
from .scenarios import PRESETS, build_scenario, preset_config, run_config_experiment
from .svg import survival_svg

EXIT_OK, EXIT_INVALID, EXIT_STEP_LIMIT = 0, 1, 2


def _fail(msg: str) -> int:
    print(f"evacsim: error: {msg}", file=sys.stderr)
    return EXIT_INVALID


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not a 64-bit unsigned integer")
    return v


def _config(args):
    if args.scenario:
        cfg = load_scenario(args.scenario)
    else:
        cfg = preset_config(args.preset)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_simulate(args) -> int:
    try:
        cfg = _config(args)
        trace = engine.run(build_scenario(cfg))
    except ValidationError as e:
        for err in e.errors:
            print(f"evacsim: invalid scenario: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ScenarioFileError, KeyError, ValueError, OSError) as e:
        return _fail(e.args[0] if isinstance(e, KeyError) else str(e))
    text = trace_csv(trace)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    if args.summary:
        Path(args.summary).write_text(trace_summary_csv(cfg.label, trace), encoding="utf-8")
    return EXIT_OK if trace.terminated_by is Termination.EVACUATED else EXIT_STEP_LIMIT


def cmd_experiment(args) -> int:
    if args.replicates < 1:
        return _fail(f"--replicates must be >= 1, got {args.replicates}")
    names = list(PRESETS) if args.all else [args.preset]
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfgs = [preset_config(n) for n in names]
    except KeyError as e:
        return _fail(e.args[0])
    except OSError as e:
        return _fail(str(e))
    status = EXIT_OK
    for cfg in cfgs:
        try:
            summary = run_config_experiment(cfg, args.replicates, args.base_seed)
        except ValidationError as e:
            for err in e.errors:
                print(f"evacsim: invalid scenario: {err}", file=sys.stderr)
            return EXIT_INVALID
        for r, t in zip(summary.runs, summary.traces):
            write_trace_csv(t, out / f"{cfg.label}_run{r.run}_seed{r.seed}.csv")
        (out / f"{cfg.label}_summary.csv").write_text(summary_csv(summary), encoding="utf-8")
        if summary.step_limited:
            status = EXIT_STEP_LIMIT
        print(f"{cfg.label}: mean={summary.mean} min={summary.min} max={summary.max} "
              f"step_limited={len(summary.step_limited)}", file=sys.stderr)
    return status


def cmd_plot(args) -> int:
    paths = sorted({p for pattern in args.traces for p in glob.glob(pattern)})
    if not paths:
        return _fail("no trace files match " + " ".join(args.traces))
    series = []
    for p in paths:
        try:
            rows = read_trace_csv(p)
        except (OSError, ValueError) as e:
            return _fail(str(e))
        series.append((Path(p).stem, [(r[0], r[1]) for r in rows]))
    svg = survival_svg(series, args.title)
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as e:
        return _fail(str(e))
    return EXIT_OK


def cmd_list_presets(args) -> int:
    for name in PRESETS:
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evacsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one simulation and write its trace CSV")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario JSON file")
    src.add_argument("--preset", help="preset name (see list-presets)")
    s.add_argument("--seed", type=_u64, help="override the scenario seed")
    s.add_argument("--out", help="trace CSV path (default: stdout)")
    s.add_argument("--summary", help="also write a one-row summary CSV here")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="run replicates of presets")
    which = e.add_mutually_exclusive_group(required=True)
    which.add_argument("--preset")
    which.add_argument("--all", action="store_true", help="every preset")
    e.add_argument("--replicates", type=int, default=5)
    e.add_argument("--base-seed", type=_u64, default=0)
    e.add_argument("--out-dir", default=".")
    e.set_defaults(func=cmd_experiment)

    pl = sub.add_parser("plot", help="plot trace CSVs as an SVG survival chart")
    pl.add_argument("--traces", nargs="+", required=True, help="trace CSV glob(s)")
    pl.add_argument("--out", required=True)
    pl.add_argument("--title", default="")
    pl.set_defaults(func=cmd_plot)

    ls = sub.add_parser("list-presets", help="print preset names")
    ls.set_defaults(func=cmd_list_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
