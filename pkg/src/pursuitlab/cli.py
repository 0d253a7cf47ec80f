"""Command-line entry points.

Subcommands: run, sweep, replay, audit, serve, report.  All numeric output
uses 6 significant digits.  Exit codes: 0 success, 2 validation failure
(bad scenario, bad arguments, replay divergence), 1 I/O failure.

Defaults for --port, --realtime, --repeats, and --scenario-dir can also be
set through environment variables with the PURSUITLAB_ prefix (for example
PURSUITLAB_PORT=8000); explicit flags win over the environment.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import yaml

from .engine import run as run_episode
from .engine import sweep as run_sweep
from .errors import SimulationError
from .scenario import load_scenario
from .variety import audit_sets

ENV_PREFIX = "PURSUITLAB_"


def _env(name: str, fallback: str | None = None) -> str | None:
    return os.environ.get(ENV_PREFIX + name, fallback)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _parse_distances(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise SimulationError(f"bad distance list {text!r}: {exc}") from exc
    if not values:
        raise SimulationError("at least one distance is required")
    for v in values:
        if not math.isfinite(v) or v <= 0:
            raise SimulationError(f"distances must be positive, got {v}")
    return sorted(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pursuitlab",
        description="Deterministic pursuit-guidance simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one episode to capture or timeout")
    p_run.add_argument("--scenario", required=True, help="scenario YAML path")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--out", default=None, help="write the episode log here (JSONL)")
    p_run.add_argument("--figures", default=None, metavar="DIR",
                       help="render figures from the log into DIR (needs --out)")

    p_sweep = sub.add_parser("sweep", help="repeat a template across start separations")
    p_sweep.add_argument("--scenario", required=True, help="template scenario YAML path")
    p_sweep.add_argument("--distances", required=True,
                         help="comma-separated start separations in m, e.g. 0.10,0.15")
    p_sweep.add_argument("--repeats", type=int,
                         default=int(_env("REPEATS", "20")), help="runs per distance")
    p_sweep.add_argument("--out", default=None, help="write the CSV table here")
    p_sweep.add_argument("--figures", default=None, metavar="DIR",
                         help="render figures from the table into DIR (needs --out)")

    p_replay = sub.add_parser("replay", help="re-validate an episode log byte-for-byte")
    p_replay.add_argument("--log", required=True, help="episode log path")

    p_audit = sub.add_parser("audit", help="requisite-variety audit of a response table")
    p_audit.add_argument("--table", required=True,
                         help="YAML/JSON file with disturbances, responses, mapping")

    p_serve = sub.add_parser("serve", help="live telemetry/steering service")
    p_serve.add_argument("--scenario", required=True, help="scenario YAML path (human leader)")
    p_serve.add_argument("--port", type=int, default=int(_env("PORT", "7420")))
    p_serve.add_argument("--realtime", type=float, default=float(_env("REALTIME", "1.0")),
                         help="wall seconds per sim dt; 1.0 = wall clock, 0 = flat out")
    p_serve.add_argument("--scenario-dir", default=_env("SCENARIO_DIR"),
                         help="catalog directory (default: the scenario's directory)")

    p_report = sub.add_parser("report", help="render figures from a log or sweep table")
    p_report.add_argument("--log", default=None, help="episode log to plot")
    p_report.add_argument("--sweep-csv", default=None, help="sweep table to plot")
    p_report.add_argument("--out", default=None, metavar="DIR",
                          help="directory for figures (default: next to the input)")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.figures and not args.out:
        raise SimulationError("--figures needs --out so there is a log to plot")
    if args.out:
        from .episodelog import LogWriter

        seed = scenario.seed if args.seed is None else args.seed
        with open(args.out, "w", encoding="utf-8") as fh:
            writer = LogWriter(fh, scenario, seed)
            result = run_episode(scenario, seed=args.seed, on_record=writer.append)
        result.log_path = args.out
    else:
        result = run_episode(scenario, seed=args.seed)
    print(
        f"{result.outcome.upper()} t={_fmt(result.time_s)}s "
        f"min_sep={_fmt(result.min_separation)} ticks={result.ticks} seed={result.seed}"
    )
    if args.out:
        print(f"log written to {args.out}")
    if args.figures:
        from .report import render_episode_figures

        for path in render_episode_figures(args.out, args.figures):
            print(f"figure written to {path}")
    return 0


def _sweep_csv_lines(rows) -> list[str]:
    lines = ["distance_m,capture_rate,mean_time_s,n"]
    for row in rows:
        mean = "nan" if math.isnan(row.mean_time_s) else _fmt(row.mean_time_s)
        lines.append(
            f"{_fmt(row.distance_m)},{_fmt(row.capture_rate)},{mean},{row.runs}"
        )
    return lines


def _cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.figures and not args.out:
        raise SimulationError("--figures needs --out so there is a table to plot")
    distances = _parse_distances(args.distances)
    if args.repeats < 1:
        raise SimulationError(f"--repeats must be >= 1, got {args.repeats}")
    rows = run_sweep(scenario, distances, args.repeats)
    lines = _sweep_csv_lines(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"sweep table written to {args.out}")
    else:
        for line in lines:
            print(line)
    if args.figures:
        from .report import render_sweep_figures

        for path in render_sweep_figures(args.out, args.figures):
            print(f"figure written to {path}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    from .episodelog import replay

    report = replay(args.log)
    if report.ok:
        print(f"OK, {report.ticks_checked} ticks")
        return 0
    print(
        f"DIVERGED at line {report.first_divergence}, "
        f"checked {report.ticks_checked} ticks"
    )
    return 2


def _cmd_audit(args: argparse.Namespace) -> int:
    with open(args.table, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise SimulationError(f"could not parse table file: {exc}") from exc
    if not isinstance(raw, dict):
        raise SimulationError("table file must be a mapping")
    unknown = set(raw) - {"disturbances", "responses", "mapping"}
    if unknown:
        raise SimulationError(f"unknown field '{sorted(unknown)[0]}' in table file")
    try:
        audit = audit_sets(
            raw.get("disturbances") or [],
            raw.get("responses") or [],
            raw.get("mapping") or {},
        )
    except ValueError as exc:
        raise SimulationError(str(exc)) from exc
    verdict = "stable" if audit.stable else "unstable"
    line = f"{verdict}, margin={audit.margin}"
    if audit.uncovered:
        line += f", uncovered: {', '.join(audit.uncovered)}"
    print(line)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    scenario = load_scenario(args.scenario)
    scenario_dir = args.scenario_dir or os.path.dirname(os.path.abspath(args.scenario))
    name = os.path.splitext(os.path.basename(args.scenario))[0]
    if args.realtime < 0:
        raise SimulationError(f"--realtime must be >= 0, got {args.realtime}")
    serve(scenario, port=args.port, realtime_factor=args.realtime,
          scenario_name=name, scenario_dir=scenario_dir)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    if not args.log and not args.sweep_csv:
        raise SimulationError("report needs --log and/or --sweep-csv")
    written: list[str] = []
    if args.log:
        from .report import render_episode_figures

        written += render_episode_figures(args.log, args.out)
    if args.sweep_csv:
        from .report import render_sweep_figures

        written += render_sweep_figures(args.sweep_csv, args.out)
    for path in written:
        print(f"figure written to {path}")
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "replay": _cmd_replay,
    "audit": _cmd_audit,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
