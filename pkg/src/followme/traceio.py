"""Trace and summary serialization.

CSV columns are fixed: tick,time_s,raw_distance_m,filtered_distance_m,
robot_speed_mps,phase,user_in_fov. Absent measurements are empty cells.
Floats are written with repr() so a parsed trace reproduces the original
records bit-for-bit, and identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import ConfigError
from .fsm import GuidancePhase
from .runner import RunSummary, TerminationReason, TraceRecord

CSV_COLUMNS = (
    "tick",
    "time_s",
    "raw_distance_m",
    "filtered_distance_m",
    "robot_speed_mps",
    "phase",
    "user_in_fov",
)


def _cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def trace_to_csv(trace: list[TraceRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in trace:
        writer.writerow(
            (
                r.tick,
                repr(r.time_s),
                _cell(r.raw_distance_m),
                _cell(r.filtered_distance_m),
                repr(r.robot_speed_mps),
                r.phase.value,
                "true" if r.user_in_fov else "false",
            )
        )
    return out.getvalue()


def write_trace_csv(trace: list[TraceRecord], destination: str) -> None:
    try:
        with open(destination, "w", encoding="utf-8", newline="") as f:
            f.write(trace_to_csv(trace))
    except OSError as e:
        raise OSError(f"cannot write trace to {destination}: {e}") from e


def parse_trace_csv(text: str) -> list[TraceRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ConfigError(f"unexpected trace header: {header}")
    trace = []
    for row in reader:
        if not row:
            continue
        trace.append(
            TraceRecord(
                tick=int(row[0]),
                time_s=float(row[1]),
                raw_distance_m=float(row[2]) if row[2] else None,
                filtered_distance_m=float(row[3]) if row[3] else None,
                robot_speed_mps=float(row[4]),
                phase=GuidancePhase(row[5]),
                user_in_fov=row[6] == "true",
            )
        )
    return trace


def read_trace_csv(path: str) -> list[TraceRecord]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            return parse_trace_csv(f.read())
    except OSError as e:
        raise OSError(f"cannot read trace from {path}: {e}") from e


def summary_to_json(summary: RunSummary) -> str:
    obj = {
        "final_phase": summary.final_phase.value,
        "stop_intervals": [list(iv) for iv in summary.stop_intervals],
        "total_stopped_s": summary.total_stopped_s,
        "total_distance_travelled_m": summary.total_distance_travelled_m,
        "termination_reason": summary.termination_reason.value,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_summary_json(summary: RunSummary, destination: str) -> None:
    try:
        with open(destination, "w", encoding="utf-8") as f:
            f.write(summary_to_json(summary))
    except OSError as e:
        raise OSError(f"cannot write summary to {destination}: {e}") from e


def parse_summary_json(text: str) -> RunSummary:
    obj = json.loads(text)
    return RunSummary(
        final_phase=GuidancePhase(obj["final_phase"]),
        stop_intervals=[tuple(iv) for iv in obj["stop_intervals"]],
        total_stopped_s=obj["total_stopped_s"],
        total_distance_travelled_m=obj["total_distance_travelled_m"],
        termination_reason=TerminationReason(obj["termination_reason"]),
    )
