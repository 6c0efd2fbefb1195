"""Mission state machine for the guidance run.

The machine orders the service calls: gesture confirmation first, then
identity lock, then guided motion with pause/resume on the monitored
distance, falling back to a home-base return on refusal, identification
failure, or loss of the user. Transitions not listed in step() leave the
phase unchanged with no actions; simulated services may deliver late
responses after a phase change, so unexpected pairs are ignored rather
than treated as errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, ProtocolError
from .sensors import PersonId


class GuidancePhase(Enum):
    IDLE = "Idle"
    AWAITING_GESTURE = "AwaitingGesture"
    IDENTIFYING = "Identifying"
    GUIDING = "Guiding"
    PAUSED = "Paused"
    ARRIVED = "Arrived"
    RETURNING_HOME = "ReturningHome"
    ABORTED = "Aborted"


TERMINAL_PHASES = frozenset({GuidancePhase.ARRIVED, GuidancePhase.ABORTED})


class GuidanceAction(Enum):
    CALL_TRY_GESTURE = "CallTryGesture"
    ENABLE_TRACKER = "EnableTracker"
    CALL_FACE_ID = "CallFaceId"
    COMMAND_FOLLOW = "CommandFollow"
    COMMAND_PAUSE = "CommandPause"
    CALL_HOME_BASE = "CallHomeBase"
    HALT = "Halt"


# Events. Each carries the tick at which it occurred; the machine requires
# them in non-decreasing tick order.


@dataclass(frozen=True, slots=True)
class GestureResult:
    ok: bool
    tick: int = 0


@dataclass(frozen=True, slots=True)
class IdentityLocked:
    person: PersonId
    tick: int = 0


@dataclass(frozen=True, slots=True)
class IdentityFailed:
    tick: int = 0


@dataclass(frozen=True, slots=True)
class DistanceUpdate:
    filtered: float
    valid: bool
    tick: int = 0


@dataclass(frozen=True, slots=True)
class LostTimeout:
    tick: int = 0


@dataclass(frozen=True, slots=True)
class PathCompleted:
    tick: int = 0


@dataclass(frozen=True, slots=True)
class HomeReached:
    tick: int = 0


@dataclass(frozen=True, slots=True)
class Tick:
    tick: int = 0


GuidanceEvent = (
    GestureResult
    | IdentityLocked
    | IdentityFailed
    | DistanceUpdate
    | LostTimeout
    | PathCompleted
    | HomeReached
    | Tick
)


@dataclass(frozen=True, slots=True)
class FsmConfig:
    gesture_attempts: int = 1
    lost_timeout: float = 2.0  # seconds of consecutive invalid samples

    def __post_init__(self):
        if not (isinstance(self.gesture_attempts, int) and self.gesture_attempts >= 1):
            raise ConfigError(
                f"gesture_attempts must be an integer >= 1, got {self.gesture_attempts}"
            )
        if not self.lost_timeout > 0.0:
            raise ConfigError(f"lost_timeout must be > 0, got {self.lost_timeout}")


@dataclass(frozen=True, slots=True)
class StepResult:
    phase: GuidancePhase
    actions: tuple[GuidanceAction, ...]
    ignored_terminal: bool = False  # event arrived after the run already ended


class GuidanceFsm:
    """Single-owner mutable state; all mutation goes through start() and step().

    d_des / d_resume are fixed at construction so step() can classify
    DistanceUpdate events without knowing anything about filtering.
    """

    def __init__(self, config: FsmConfig, d_des: float = 2.0, d_resume: float = 1.8):
        if not 0.0 < d_resume <= d_des:
            raise ConfigError(
                f"d_resume ({d_resume}) must be in (0, d_des ({d_des})]"
            )
        self.config = config
        self.d_des = d_des
        self.d_resume = d_resume
        self.phase = GuidancePhase.IDLE
        self._attempts_used = 0
        self._last_tick = 0

    def start(self) -> tuple[GuidanceAction, ...]:
        """Kick off the mission: the first task is gesture recognition."""
        if self.phase is not GuidancePhase.IDLE:
            raise ProtocolError(f"start() requires Idle, machine is in {self.phase.value}")
        self.phase = GuidancePhase.AWAITING_GESTURE
        self._attempts_used = 1
        return (GuidanceAction.CALL_TRY_GESTURE,)

    def step(self, event: GuidanceEvent) -> StepResult:
        if event.tick < self._last_tick:
            raise ProtocolError(
                f"event tick {event.tick} precedes last processed tick {self._last_tick}"
            )
        self._last_tick = event.tick

        if self.phase in TERMINAL_PHASES:
            return StepResult(self.phase, (), ignored_terminal=True)

        phase = self.phase
        if phase is GuidancePhase.AWAITING_GESTURE and isinstance(event, GestureResult):
            if event.ok:
                return self._go(
                    GuidancePhase.IDENTIFYING,
                    (GuidanceAction.ENABLE_TRACKER, GuidanceAction.CALL_FACE_ID),
                )
            if self._attempts_used < self.config.gesture_attempts:
                self._attempts_used += 1
                return self._go(
                    GuidancePhase.AWAITING_GESTURE, (GuidanceAction.CALL_TRY_GESTURE,)
                )
            return self._go(
                GuidancePhase.RETURNING_HOME, (GuidanceAction.CALL_HOME_BASE,)
            )

        if phase is GuidancePhase.IDENTIFYING:
            if isinstance(event, IdentityLocked):
                return self._go(GuidancePhase.GUIDING, (GuidanceAction.COMMAND_FOLLOW,))
            if isinstance(event, IdentityFailed):
                return self._go(
                    GuidancePhase.RETURNING_HOME, (GuidanceAction.CALL_HOME_BASE,)
                )

        if phase is GuidancePhase.GUIDING and isinstance(event, DistanceUpdate):
            if event.valid and event.filtered > self.d_des:
                return self._go(GuidancePhase.PAUSED, (GuidanceAction.COMMAND_PAUSE,))

        if phase is GuidancePhase.PAUSED and isinstance(event, DistanceUpdate):
            if event.valid and event.filtered <= self.d_resume:
                return self._go(GuidancePhase.GUIDING, (GuidanceAction.COMMAND_FOLLOW,))

        if phase in (GuidancePhase.GUIDING, GuidancePhase.PAUSED) and isinstance(
            event, LostTimeout
        ):
            return self._go(
                GuidancePhase.RETURNING_HOME, (GuidanceAction.CALL_HOME_BASE,)
            )

        if phase is GuidancePhase.GUIDING and isinstance(event, PathCompleted):
            return self._go(GuidancePhase.ARRIVED, (GuidanceAction.HALT,))

        if phase is GuidancePhase.RETURNING_HOME and isinstance(event, HomeReached):
            return self._go(GuidancePhase.ABORTED, (GuidanceAction.HALT,))

        return StepResult(phase, ())

    def _go(
        self, phase: GuidancePhase, actions: tuple[GuidanceAction, ...]
    ) -> StepResult:
        self.phase = phase
        return StepResult(phase, actions)
