"""Scenario files: a flat TOML format describing the world, the user script,
and every tunable the run needs. Omitted tables fall back to the documented
defaults; validation happens up front so run() never sees a bad config.

Tables and keys (defaults in parentheses):

    [path]       waypoints = [[x, y], ...]          required, >= 2 points
    [user]       start = [x, y]                     (1.5 m behind the path start)
                 speed_max = 1.2
                 script = [{start, end, behavior, gap?}, ...]   required
                     behavior: "follow" (needs gap), "hold", "leave"
    [controller] d_des = 2.0, d_resume = 1.8, v_nom = 0.5, v_max = 1.5
    [fsm]        gesture_attempts = 1, lost_timeout = 2.0
    [filter]     alpha = 0.2
    [noise]      sigma = 0.05, dropout_p = 0.02, outlier_p = 0.01, outlier_mag = 1.5
    [detector]   gesture_true_p = 0.95, gesture_latency = 10,
                 id_success_p = 0.95, id_latency = 20
    [fov]        half_angle = 0.7592, max_range = 6.0
    [sim]        dt = 0.05, max_ticks = 2000, seed = 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .controller import ControllerConfig
from .errors import ConfigError
from .fsm import FsmConfig
from .sensors import DetectorProfile, SensorNoise
from .world import (
    FollowAtGap,
    FovModel,
    Hold,
    LeaveField,
    PathPolyline,
    Point,
    ScriptSegment,
    UserScript,
)

BUNDLED_SCENARIOS = (
    "happy_path",
    "gesture_refused",
    "intermittent_lag",
    "walk_away",
    "noisy_constant",
)


@dataclass(frozen=True)
class ScenarioConfig:
    path: PathPolyline
    user_script: UserScript
    user_start: Point | None = None  # None: 1.5 m behind the first waypoint
    user_speed_max: float = 1.2
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    fsm: FsmConfig = field(default_factory=FsmConfig)
    alpha: float = 0.2
    noise: SensorNoise = field(default_factory=SensorNoise)
    detector: DetectorProfile = field(default_factory=DetectorProfile)
    fov: FovModel = field(default_factory=FovModel)
    dt: float = 0.05
    max_ticks: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if not self.max_ticks > 0:
            raise ConfigError(f"max_ticks must be > 0, got {self.max_ticks}")
        if not self.user_speed_max > 0.0:
            raise ConfigError(f"user speed_max must be > 0, got {self.user_speed_max}")
        if self.user_start is None:
            (x0, y0), (x1, y1) = self.path.waypoints[0], self.path.waypoints[1]
            seg = math.hypot(x1 - x0, y1 - y0)
            object.__setattr__(
                self,
                "user_start",
                (x0 - 1.5 * (x1 - x0) / seg, y0 - 1.5 * (y1 - y0) / seg),
            )


def with_seed(config: ScenarioConfig, seed: int) -> ScenarioConfig:
    """Copy of the config with the run seed (and its mirror in the noise
    model) replaced."""
    return replace(config, seed=seed, noise=replace(config.noise, seed=seed))


def _section(data: dict, name: str, allowed: set[str]) -> dict:
    sec = data.pop(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    return sec


def _waypoints(raw: Any) -> list[Point]:
    if not isinstance(raw, list):
        raise ConfigError("path.waypoints must be an array of [x, y] pairs")
    pts = []
    for i, p in enumerate(raw):
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError(f"path.waypoints[{i}] must be an [x, y] pair")
        pts.append((float(p[0]), float(p[1])))
    return pts


def _script(raw: Any) -> UserScript:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("user.script must be a non-empty array of segments")
    segments = []
    for i, seg in enumerate(raw):
        if not isinstance(seg, dict):
            raise ConfigError(f"user.script[{i}] must be a table")
        unknown = set(seg) - {"start", "end", "behavior", "gap"}
        if unknown:
            raise ConfigError(
                f"unknown key(s) in user.script[{i}]: {', '.join(sorted(unknown))}"
            )
        kind = seg.get("behavior")
        if kind == "follow":
            if "gap" not in seg:
                raise ConfigError(f"user.script[{i}]: behavior 'follow' needs a gap")
            behavior = FollowAtGap(float(seg["gap"]))
        elif kind == "hold":
            behavior = Hold()
        elif kind == "leave":
            behavior = LeaveField()
        else:
            raise ConfigError(
                f"user.script[{i}]: behavior must be 'follow', 'hold' or 'leave', "
                f"got {kind!r}"
            )
        try:
            start, end = float(seg["start"]), float(seg["end"])
        except KeyError as e:
            raise ConfigError(f"user.script[{i}] missing {e.args[0]!r}") from None
        segments.append(ScriptSegment(start, end, behavior))
    return UserScript(segments)


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario file, applying defaults for
    anything omitted."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"scenario parse error: {e}") from None

    path_sec = _section(data, "path", {"waypoints"})
    if "waypoints" not in path_sec:
        raise ConfigError("missing required key path.waypoints")
    path = PathPolyline(_waypoints(path_sec["waypoints"]))

    user = _section(data, "user", {"start", "speed_max", "script"})
    if "script" not in user:
        raise ConfigError("missing required key user.script")
    script = _script(user["script"])
    start = user.get("start")
    if start is not None:
        if not (isinstance(start, list) and len(start) == 2):
            raise ConfigError("user.start must be an [x, y] pair")
        start = (float(start[0]), float(start[1]))

    ctrl = _section(data, "controller", {"d_des", "d_resume", "v_nom", "v_max"})
    fsm_sec = _section(data, "fsm", {"gesture_attempts", "lost_timeout"})
    filt = _section(data, "filter", {"alpha"})
    noise = _section(
        data, "noise", {"sigma", "dropout_p", "outlier_p", "outlier_mag"}
    )
    det = _section(
        data,
        "detector",
        {"gesture_true_p", "gesture_latency", "id_success_p", "id_latency"},
    )
    fov = _section(data, "fov", {"half_angle", "max_range"})
    sim = _section(data, "sim", {"dt", "max_ticks", "seed"})
    if data:
        raise ConfigError(f"unknown table(s): {', '.join(sorted(data))}")

    seed = int(sim.get("seed", 0))
    return ScenarioConfig(
        path=path,
        user_script=script,
        user_start=start,
        user_speed_max=float(user.get("speed_max", 1.2)),
        controller=ControllerConfig(**ctrl),
        fsm=FsmConfig(**fsm_sec),
        alpha=float(filt.get("alpha", 0.2)),
        noise=SensorNoise(seed=seed, **noise),
        detector=DetectorProfile(**det),
        fov=FovModel(**fov),
        dt=float(sim.get("dt", 0.05)),
        max_ticks=int(sim.get("max_ticks", 2000)),
        seed=seed,
    )


def load_scenario_file(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        return load_scenario(f.read())


def bundled_scenario_text(name: str) -> str:
    """Source text of one of the scenarios shipped with the package."""
    if name not in BUNDLED_SCENARIOS:
        raise ConfigError(
            f"unknown bundled scenario {name!r}; available: {', '.join(BUNDLED_SCENARIOS)}"
        )
    return (
        resources.files("followme").joinpath(f"scenarios/{name}.toml").read_text("utf-8")
    )


def load_bundled_scenario(name: str) -> ScenarioConfig:
    return load_scenario(bundled_scenario_text(name))
