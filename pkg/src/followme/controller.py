"""Distance classification and velocity command generation.

Pause/resume uses a hysteresis band: the robot stops as soon as the filtered
distance exceeds d_des and resumes only once the user has re-closed to
d_resume or less, so noise at the stop threshold cannot make it chatter.
Invalid samples freeze the pause flag and feed the loss-of-user timeout
instead of forcing a stop.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigError
from .fsm import FsmConfig, GuidancePhase


@dataclass(frozen=True, slots=True)
class ControllerConfig:
    d_des: float = 2.0  # stop when filtered distance exceeds this
    d_resume: float = 1.8  # resume once filtered distance is back at or below this
    v_nom: float = 0.5  # m/s along the path while guiding
    v_max: float = 1.5  # m/s hard bound on any command

    def __post_init__(self):
        if not self.d_resume > 0.0:
            raise ConfigError(f"d_resume must be > 0, got {self.d_resume}")
        if self.d_resume > self.d_des:
            raise ConfigError(
                f"d_resume ({self.d_resume}) must be <= d_des ({self.d_des})"
            )
        if not self.v_nom > 0.0:
            raise ConfigError(f"v_nom must be > 0, got {self.v_nom}")
        if self.v_nom > self.v_max:
            raise ConfigError(f"v_nom ({self.v_nom}) must be <= v_max ({self.v_max})")


@dataclass(frozen=True, slots=True)
class VelocityCommand:
    linear: float  # m/s
    angular: float = 0.0  # rad/s, always 0: motion is path-parameterized


@dataclass(frozen=True, slots=True)
class FollowState:
    paused: bool = False
    ticks_since_valid_sample: int = 0


class MotionClass(Enum):
    MOVING = "moving"
    PAUSED = "paused"


def classify_distance(
    cfg: ControllerConfig, state: FollowState, filtered_d: float, valid: bool
) -> tuple[FollowState, MotionClass]:
    """Fold one filtered sample into the pause/resume state.

    Valid samples reset the since-valid counter; invalid ones increment it and
    leave the pause flag untouched.
    """
    if not valid:
        state = replace(
            state, ticks_since_valid_sample=state.ticks_since_valid_sample + 1
        )
        return state, MotionClass.PAUSED if state.paused else MotionClass.MOVING
    paused = state.paused
    if filtered_d > cfg.d_des:
        paused = True
    elif paused and filtered_d <= cfg.d_resume:
        paused = False
    state = FollowState(paused=paused, ticks_since_valid_sample=0)
    return state, MotionClass.PAUSED if paused else MotionClass.MOVING


def compute_command(
    cfg: ControllerConfig, phase: GuidancePhase, state: FollowState
) -> VelocityCommand:
    """Velocity for the current tick: v_nom while actively guiding an unpaused
    user or returning home, zero otherwise. The homeward sign is applied by
    the caller as a negative path speed."""
    moving = (
        phase is GuidancePhase.GUIDING and not state.paused
    ) or phase is GuidancePhase.RETURNING_HOME
    return VelocityCommand(linear=cfg.v_nom if moving else 0.0)


def lost_timeout_elapsed(fsm_cfg: FsmConfig, state: FollowState, dt: float) -> bool:
    """True once the user has been unmeasurable for lost_timeout seconds."""
    return state.ticks_since_valid_sample * dt >= fsm_cfg.lost_timeout
