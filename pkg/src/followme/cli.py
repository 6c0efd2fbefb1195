"""Command-line front end.

    followme run --scenario FILE --out DIR [--seed N] [--max-ticks N]
    followme validate --scenario FILE
    followme plot --trace CSV --out SVG [--threshold D]
    followme report --trace CSV

`run` writes trace.csv, summary.json and plot.svg into the output directory
and exits 0 when the mission arrived, 2 when it aborted, 3 when it hit the
tick limit. The FOLLOWME_SEED environment variable overrides the scenario
seed; --seed overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .errors import ConfigError
from .plot import emit_plot
from .runner import TerminationReason, compute_stop_intervals, run
from .scenario import load_scenario_file, with_seed
from .traceio import read_trace_csv, write_summary_json, write_trace_csv

EXIT_CODES = {
    TerminationReason.ARRIVED: 0,
    TerminationReason.ABORTED: 2,
    TerminationReason.MAX_TICKS: 3,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="followme", description="deterministic robot-guidance simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write its artifacts")
    p_run.add_argument("--scenario", required=True, help="scenario TOML file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the run seed")
    p_run.add_argument(
        "--max-ticks", type=int, default=None, help="override the tick limit"
    )

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)

    p_plot = sub.add_parser("plot", help="re-render a saved trace as SVG")
    p_plot.add_argument("--trace", required=True, help="trace CSV file")
    p_plot.add_argument("--out", required=True, help="output SVG file")
    p_plot.add_argument(
        "--threshold", type=float, default=2.0, help="stop-distance reference line [m]"
    )

    p_rep = sub.add_parser("report", help="print stop intervals and totals as JSON")
    p_rep.add_argument("--trace", required=True, help="trace CSV file")
    return parser


def _resolve_seed(cli_seed: int | None) -> int | None:
    if cli_seed is not None:
        return cli_seed
    env = os.environ.get("FOLLOWME_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"FOLLOWME_SEED must be an integer, got {env!r}") from None


def _cmd_run(args) -> int:
    config = load_scenario_file(args.scenario)
    seed = _resolve_seed(args.seed)
    if seed is not None:
        config = with_seed(config, seed)
    if args.max_ticks is not None:
        config = replace(config, max_ticks=args.max_ticks)
    result = run(config)
    os.makedirs(args.out, exist_ok=True)
    write_trace_csv(result.trace, os.path.join(args.out, "trace.csv"))
    write_summary_json(result.summary, os.path.join(args.out, "summary.json"))
    emit_plot(result.trace, os.path.join(args.out, "plot.svg"), config.controller.d_des)
    print(
        f"{result.summary.termination_reason.value}: "
        f"phase={result.summary.final_phase.value} "
        f"ticks={len(result.trace)} "
        f"stops={len(result.summary.stop_intervals)}"
    )
    return EXIT_CODES[result.summary.termination_reason]


def _cmd_validate(args) -> int:
    try:
        load_scenario_file(args.scenario)
    except ConfigError as e:
        print(f"invalid: {e}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_plot(args) -> int:
    trace = read_trace_csv(args.trace)
    if not trace:
        print("error: trace is empty", file=sys.stderr)
        return 2
    emit_plot(trace, args.out, args.threshold)
    return 0


def _cmd_report(args) -> int:
    trace = read_trace_csv(args.trace)
    intervals = compute_stop_intervals(trace)
    dt = trace[1].time_s - trace[0].time_s if len(trace) > 1 else 0.0
    travelled = sum(r.robot_speed_mps * dt for r in trace)
    report = {
        "ticks": len(trace),
        "final_phase": trace[-1].phase.value if trace else None,
        "stop_intervals": [list(iv) for iv in intervals],
        "total_stopped_s": sum(e - s + 1 for s, e in intervals) * dt,
        "total_distance_travelled_m": travelled,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "plot": _cmd_plot,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
