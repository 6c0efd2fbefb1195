"""Discrete-time 2D world: path-parameterized robot motion, a scripted user
agent, ground-truth geometry, and the rear-camera field-of-view test.

The robot never steers freely: its pose is a function of arc length along a
polyline path, which keeps the stop/resume logic exactly reproducible. The
home-base return is a negative path speed back to s = 0.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import ConfigError

Point = tuple[float, float]


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True, slots=True)
class Pose2D:
    x: float
    y: float
    theta: float  # radians, normalized to (-pi, pi]


@dataclass(frozen=True, slots=True)
class PathPosition:
    """Arc length from the path start, clamped to [0, total]."""

    s: float


class PathPolyline:
    """Ordered waypoints with precomputed cumulative arc lengths."""

    def __init__(self, waypoints: list[Point]):
        if len(waypoints) < 2:
            raise ConfigError("path needs at least 2 waypoints")
        self.waypoints = [(float(x), float(y)) for x, y in waypoints]
        self.cumulative = [0.0]
        for (x0, y0), (x1, y1) in zip(self.waypoints, self.waypoints[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            if seg == 0.0:
                raise ConfigError(
                    f"consecutive waypoints must be distinct, got repeated ({x0}, {y0})"
                )
            self.cumulative.append(self.cumulative[-1] + seg)
        self.total_length = self.cumulative[-1]

    def pose_at(self, s: float, direction: int = 1) -> Pose2D:
        """Interpolate the pose at arc length s; theta is the segment heading,
        flipped when direction < 0 (homeward travel)."""
        s = min(max(s, 0.0), self.total_length)
        i = bisect_right(self.cumulative, s) - 1
        i = min(i, len(self.waypoints) - 2)
        (x0, y0), (x1, y1) = self.waypoints[i], self.waypoints[i + 1]
        seg = self.cumulative[i + 1] - self.cumulative[i]
        f = (s - self.cumulative[i]) / seg
        heading = math.atan2(y1 - y0, x1 - x0)
        if direction < 0:
            heading = normalize_angle(heading + math.pi)
        return Pose2D(x0 + f * (x1 - x0), y0 + f * (y1 - y0), normalize_angle(heading))


def advance_along_path(
    path: PathPolyline, pos: PathPosition, v: float, dt: float
) -> tuple[PathPosition, Pose2D, bool]:
    """Move along the path by v*dt (v may be negative), clamped to the ends.

    Returns the new position, interpolated pose, and whether the far end of
    the path was reached.
    """
    s = min(max(pos.s + v * dt, 0.0), path.total_length)
    direction = -1 if v < 0 else 1
    return PathPosition(s), path.pose_at(s, direction), s == path.total_length


# --- scripted user agent ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class FollowAtGap:
    """Walk straight toward the robot, stopping at target_gap meters."""

    target_gap: float


@dataclass(frozen=True, slots=True)
class Hold:
    """Stand still."""


@dataclass(frozen=True, slots=True)
class LeaveField:
    """Walk perpendicular to the robot's heading until out of the rear cone."""


UserBehavior = FollowAtGap | Hold | LeaveField


@dataclass(frozen=True, slots=True)
class ScriptSegment:
    start: float  # seconds, inclusive
    end: float  # seconds, exclusive
    behavior: UserBehavior


class UserScript:
    """Time-ordered, non-overlapping behavior segments; gaps default to Hold."""

    def __init__(self, segments: list[ScriptSegment]):
        for seg in segments:
            if not seg.start < seg.end:
                raise ConfigError(
                    f"script segment must have start < end, got [{seg.start}, {seg.end})"
                )
        ordered = sorted(segments, key=lambda s: s.start)
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise ConfigError(
                    f"script segments overlap: [{a.start}, {a.end}) and [{b.start}, {b.end})"
                )
        self.segments = ordered

    def behavior_at(self, t: float) -> UserBehavior:
        for seg in self.segments:
            if seg.start <= t < seg.end:
                return seg.behavior
        return Hold()


def step_user(
    script: UserScript,
    t: float,
    user_pos: Point,
    robot_pose: Pose2D,
    dt: float,
    user_speed_max: float,
) -> Point:
    """Advance the user by one timestep according to the active behavior."""
    behavior = script.behavior_at(t)
    ux, uy = user_pos
    if isinstance(behavior, Hold):
        return user_pos
    if isinstance(behavior, FollowAtGap):
        dx = robot_pose.x - ux
        dy = robot_pose.y - uy
        gap = math.hypot(dx, dy)
        if gap <= behavior.target_gap or gap == 0.0:
            return user_pos
        step = min(user_speed_max * dt, gap - behavior.target_gap)
        return (ux + dx / gap * step, uy + dy / gap * step)
    # LeaveField: strafe left relative to the robot's heading
    d = robot_pose.theta + math.pi / 2.0
    return (ux + math.cos(d) * user_speed_max * dt, uy + math.sin(d) * user_speed_max * dt)


# --- ground-truth geometry --------------------------------------------------


def true_distance(robot_pose: Pose2D, user_pos: Point) -> float:
    """Euclidean distance between the robot reference point and the user."""
    return math.hypot(user_pos[0] - robot_pose.x, user_pos[1] - robot_pose.y)


@dataclass(frozen=True, slots=True)
class FovModel:
    """Rear-facing camera cone: the sensing axis is theta + pi."""

    half_angle: float = 0.7592  # rad, 43.5 deg
    max_range: float = 6.0  # meters
    facing: str = "rear"

    def __post_init__(self):
        if not (0.0 < self.half_angle < math.pi):
            raise ConfigError(f"fov half_angle must be in (0, pi), got {self.half_angle}")
        if not self.max_range > 0.0:
            raise ConfigError(f"fov max_range must be > 0, got {self.max_range}")
        if self.facing != "rear":
            raise ConfigError(f"only a rear-facing camera is supported, got {self.facing!r}")


def in_fov(fov: FovModel, robot_pose: Pose2D, user_pos: Point) -> bool:
    """True iff the user is inside the rear cone and within range.

    A user at zero distance is in view by convention (bearing undefined).
    """
    d = true_distance(robot_pose, user_pos)
    if d > fov.max_range:
        return False
    if d == 0.0:
        return True
    bearing = math.atan2(user_pos[1] - robot_pose.y, user_pos[0] - robot_pose.x)
    off_axis = abs(normalize_angle(bearing - (robot_pose.theta + math.pi)))
    return off_axis <= fov.half_angle
