"""Deterministic simulator for a gesture-initiated, distance-monitored robot
guidance mission: a scripted user is led along a predefined path while the
robot watches the gap through a rear camera, pausing when the user falls
behind and falling back to its home base when the user refuses or is lost.
"""

from .bus import MessageBus, ServiceOutcome
from .controller import (
    ControllerConfig,
    FollowState,
    MotionClass,
    VelocityCommand,
    classify_distance,
    compute_command,
    lost_timeout_elapsed,
)
from .errors import ConfigError, MeasurementError, ProtocolError
from .filter import EmaFilter
from .fsm import (
    FsmConfig,
    GuidanceAction,
    GuidanceFsm,
    GuidancePhase,
    StepResult,
)
from .runner import (
    RunResult,
    RunSummary,
    TerminationReason,
    TraceRecord,
    compute_stop_intervals,
    run,
)
from .scenario import (
    BUNDLED_SCENARIOS,
    ScenarioConfig,
    load_bundled_scenario,
    load_scenario,
    load_scenario_file,
    with_seed,
)
from .sensors import DetectorProfile, DistanceSample, PersonId, SensorNoise, Tracker
from .world import (
    FovModel,
    PathPolyline,
    PathPosition,
    Pose2D,
    UserScript,
    advance_along_path,
    in_fov,
    step_user,
    true_distance,
)

__version__ = "0.1.0"
