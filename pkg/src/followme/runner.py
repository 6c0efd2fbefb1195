"""Top-level simulation loop and trace analysis.

Tick-phase order is normative; changing it changes every trace:

    1. user step            (scripted agent moves)
    2. tracker publish      (one distance sample if enabled and locked)
    3. bus delivery         (everything due this tick, in total order)
    4. filter update        (valid samples only; the filter holds otherwise)
    5. classify + FSM step  (distance events, service responses, timeouts)
    6. compute command
    7. robot advance        (signed path speed; negative when homing)
    8. record trace

A run terminates when the mission reaches Arrived or Aborted, or after
max_ticks. Identical (config, seed) pairs give byte-identical outputs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

from . import controller as ctl
from .bus import (
    DeliveryKind,
    MessageBus,
    ServiceLogEntry,
    ServiceOutcome,
)
from .filter import EmaFilter
from .fsm import (
    DistanceUpdate,
    GestureResult,
    GuidanceAction,
    GuidanceEvent,
    GuidanceFsm,
    GuidancePhase,
    HomeReached,
    IdentityFailed,
    IdentityLocked,
    LostTimeout,
    PathCompleted,
    TERMINAL_PHASES,
)
from .scenario import ScenarioConfig
from .sensors import PersonId, Tracker, face_id_service, gesture_service
from .world import PathPosition, advance_along_path, in_fov, step_user

GUIDANCE_PHASES = frozenset({GuidancePhase.GUIDING, GuidancePhase.PAUSED})


class TerminationReason(Enum):
    ARRIVED = "arrived"
    ABORTED = "aborted"
    MAX_TICKS = "max_ticks"


@dataclass(frozen=True, slots=True)
class TraceRecord:
    tick: int
    time_s: float
    raw_distance_m: float | None  # empty when no valid measurement this tick
    filtered_distance_m: float | None  # empty until the first valid sample
    robot_speed_mps: float  # effective |ds|/dt, clamping included
    phase: GuidancePhase
    user_in_fov: bool


@dataclass(frozen=True)
class RunSummary:
    final_phase: GuidancePhase
    stop_intervals: list[tuple[int, int]]
    total_stopped_s: float
    total_distance_travelled_m: float
    termination_reason: TerminationReason


@dataclass(frozen=True)
class RunResult:
    trace: list[TraceRecord]
    summary: RunSummary
    service_calls: list[ServiceLogEntry] = field(default_factory=list)
    actions: list[tuple[int, GuidanceAction]] = field(default_factory=list)
    final_path_s: float = 0.0


def compute_stop_intervals(trace: list[TraceRecord]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive zero-speed ticks while the mission is in
    Guiding or Paused; everything outside guidance is excluded."""
    intervals: list[tuple[int, int]] = []
    start = None
    for rec in trace:
        stopped = rec.robot_speed_mps == 0.0 and rec.phase in GUIDANCE_PHASES
        if stopped and start is None:
            start = rec.tick
        elif not stopped and start is not None:
            intervals.append((start, rec.tick - 1))
            start = None
    if start is not None:
        intervals.append((start, trace[-1].tick))
    return intervals


def run(config: ScenarioConfig) -> RunResult:
    """Execute one scenario to completion."""
    rng = random.Random(config.seed)
    dt = config.dt
    bus = MessageBus()
    tracker = Tracker()
    ema = EmaFilter(config.alpha)
    fsm = GuidanceFsm(config.fsm, config.controller.d_des, config.controller.d_resume)
    follow = ctl.FollowState()
    target = PersonId("user", is_target=True)

    path = config.path
    pos = PathPosition(0.0)
    robot_pose = path.pose_at(0.0)
    user_pos = config.user_start
    fov = config.fov
    # every service call times out after 2 s worth of ticks; a hung service
    # must not hang the run
    svc_timeout = max(1, round(2.0 / dt))

    # Service handlers close over the live world state; they run at call time.
    def handle_try_gesture(_req):
        present = in_fov(fov, robot_pose, user_pos)
        return gesture_service(config.detector, rng, present)

    def handle_face_id(_req):
        visible = [target] if in_fov(fov, robot_pose, user_pos) else []
        return face_id_service(config.detector, rng, visible)

    def handle_tracker_enable(_req):
        tracker.enabled = True
        return True

    bus.declare_topic("distance_samples")
    bus.register_service("try_gesture", handle_try_gesture, config.detector.gesture_latency)
    bus.register_service("face_id", handle_face_id, config.detector.id_latency)
    bus.register_service("tracker_enable", handle_tracker_enable, 0)
    bus.register_service("home_base", lambda _req: True, 0)

    trace: list[TraceRecord] = []
    action_log: list[tuple[int, GuidanceAction]] = []
    pending: list[GuidanceEvent] = []  # world events noticed after the FSM ran
    travelled = 0.0
    reason = TerminationReason.MAX_TICKS

    def execute(actions, tick: int) -> None:
        for action in actions:
            action_log.append((tick, action))
            if action is GuidanceAction.CALL_TRY_GESTURE:
                bus.call_service("try_gesture", None, svc_timeout)
            elif action is GuidanceAction.ENABLE_TRACKER:
                bus.call_service("tracker_enable", None, svc_timeout)
            elif action is GuidanceAction.CALL_FACE_ID:
                bus.call_service("face_id", None, svc_timeout)
            elif action is GuidanceAction.CALL_HOME_BASE:
                bus.call_service("home_base", None, svc_timeout)
            # COMMAND_FOLLOW / COMMAND_PAUSE / HALT need no bus traffic: the
            # velocity command is recomputed from phase + pause flag each tick.

    for tick in range(config.max_ticks):
        bus.begin_tick(tick)
        t = tick * dt

        # 1. user step
        user_pos = step_user(
            config.user_script, t, user_pos, robot_pose, dt, config.user_speed_max
        )

        # 2. tracker publish
        sample = tracker.step(rng, config.noise, fov, robot_pose, user_pos, tick)
        if sample is not None:
            bus.publish("distance_samples", sample, 0)

        # 3. bus delivery
        deliveries = bus.tick_deliver(tick)

        # 4+5. filter, classify, FSM
        events: list[GuidanceEvent] = pending
        pending = []
        raw_this_tick: float | None = None
        for env in deliveries:
            if env.kind is DeliveryKind.TOPIC:
                s = env.payload
                if s.valid:
                    raw_this_tick = s.raw
                    filtered = ema.update(s.raw)
                    follow, _ = ctl.classify_distance(
                        config.controller, follow, filtered, True
                    )
                    events.append(DistanceUpdate(filtered, True, tick))
                else:
                    follow, _ = ctl.classify_distance(
                        config.controller, follow, math.nan, False
                    )
                    events.append(
                        DistanceUpdate(
                            ema.last if ema.last is not None else math.nan, False, tick
                        )
                    )
            elif env.name == "try_gesture":
                ok = bool(env.payload) if env.outcome is ServiceOutcome.RESPONSE else False
                events.append(GestureResult(ok, tick))
            elif env.name == "face_id":
                if env.outcome is ServiceOutcome.RESPONSE and env.payload is not None:
                    events.append(IdentityLocked(env.payload, tick))
                else:
                    events.append(IdentityFailed(tick))
            # tracker_enable / home_base acks carry no event

        if fsm.phase in GUIDANCE_PHASES and ctl.lost_timeout_elapsed(
            config.fsm, follow, dt
        ):
            events.append(LostTimeout(tick))

        if fsm.phase is GuidancePhase.IDLE:
            execute(fsm.start(), tick)

        for event in events:
            result = fsm.step(event)
            execute(result.actions, tick)
            if isinstance(event, IdentityLocked) and result.actions:
                # fresh lock: bind the tracker and forget stale smoothing
                tracker.locked = event.person
                ema.reset()
                follow = ctl.FollowState()

        # 6. compute command
        cmd = ctl.compute_command(config.controller, fsm.phase, follow)
        path_v = -cmd.linear if fsm.phase is GuidancePhase.RETURNING_HOME else cmd.linear

        # 7. robot advance
        new_pos, robot_pose, completed = advance_along_path(path, pos, path_v, dt)
        ds = abs(new_pos.s - pos.s)
        travelled += ds
        pos = new_pos
        if completed and fsm.phase is GuidancePhase.GUIDING:
            pending.append(PathCompleted(tick + 1))
        if pos.s == 0.0 and fsm.phase is GuidancePhase.RETURNING_HOME:
            pending.append(HomeReached(tick + 1))

        # 8. record
        trace.append(
            TraceRecord(
                tick=tick,
                time_s=t,
                raw_distance_m=raw_this_tick,
                filtered_distance_m=ema.last,
                robot_speed_mps=ds / dt,
                phase=fsm.phase,
                user_in_fov=in_fov(fov, robot_pose, user_pos),
            )
        )

        if fsm.phase in TERMINAL_PHASES:
            reason = (
                TerminationReason.ARRIVED
                if fsm.phase is GuidancePhase.ARRIVED
                else TerminationReason.ABORTED
            )
            break

    intervals = compute_stop_intervals(trace)
    stopped_ticks = sum(e - s + 1 for s, e in intervals)
    summary = RunSummary(
        final_phase=fsm.phase,
        stop_intervals=intervals,
        total_stopped_s=stopped_ticks * dt,
        total_distance_travelled_m=travelled,
        termination_reason=reason,
    )
    return RunResult(
        trace=trace,
        summary=summary,
        service_calls=bus.call_log,
        actions=action_log,
        final_path_s=pos.s,
    )
