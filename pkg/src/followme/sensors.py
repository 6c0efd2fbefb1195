"""Simulated perception services: noisy distance measurement, gesture
confirmation, and face identification, all driven by one seeded RNG.

Draw discipline keeps runs reproducible: sample_distance consumes exactly
three draws per in-view call (dropout, gaussian, outlier) regardless of the
outcome, and the recognition services draw only when a detection is actually
possible. With one RNG owned by the run loop and a fixed per-tick call
order, identical (seed, scenario) pairs give identical sample sequences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError
from .world import FovModel, Point, Pose2D, in_fov, true_distance


@dataclass(frozen=True, slots=True)
class PersonId:
    ident: str
    is_target: bool = False  # ground truth, never shown to the mission logic


@dataclass(frozen=True, slots=True)
class DistanceSample:
    tick: int
    raw: float | None  # meters, present iff valid
    valid: bool


@dataclass(frozen=True, slots=True)
class SensorNoise:
    sigma: float = 0.05  # gaussian std, meters
    dropout_p: float = 0.02
    outlier_p: float = 0.01
    outlier_mag: float = 1.5  # positive spike: depth reads the background instead
    seed: int = 0

    def __post_init__(self):
        for name in ("dropout_p", "outlier_p"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        if self.sigma < 0.0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        if self.outlier_mag < 0.0:
            raise ConfigError(f"outlier_mag must be >= 0, got {self.outlier_mag}")


@dataclass(frozen=True, slots=True)
class DetectorProfile:
    gesture_true_p: float = 0.95
    gesture_latency: int = 10  # ticks until the service response arrives
    id_success_p: float = 0.95
    id_latency: int = 20

    def __post_init__(self):
        for name in ("gesture_true_p", "id_success_p"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        for name in ("gesture_latency", "id_latency"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


def sample_distance(
    noise: SensorNoise,
    rng: random.Random,
    true_d: float,
    in_view: bool,
    tick: int = 0,
) -> DistanceSample:
    """One depth measurement of the user.

    Out-of-view targets always yield an invalid sample and consume no draws.
    In-view targets consume three draws in fixed order (dropout, gaussian,
    outlier) so the random stream does not depend on the noise parameters.
    """
    if not in_view:
        return DistanceSample(tick, None, False)
    dropped = rng.random() < noise.dropout_p
    jitter = rng.gauss(0.0, noise.sigma)
    spike = noise.outlier_mag if rng.random() < noise.outlier_p else 0.0
    if dropped:
        return DistanceSample(tick, None, False)
    return DistanceSample(tick, max(0.0, true_d + jitter + spike), True)


def gesture_service(
    profile: DetectorProfile, rng: random.Random, user_present_and_gesturing: bool
) -> bool:
    """Recognition outcome for one gesture attempt. False is the failure
    response, not an error. Draws only when there is a gesture to classify."""
    if not user_present_and_gesturing:
        return False
    return rng.random() < profile.gesture_true_p


def face_id_service(
    profile: DetectorProfile, rng: random.Random, persons_in_view: list[PersonId]
) -> PersonId | None:
    """Identify the target among the visible persons.

    Returns the locked person or None on failure. Only the ground-truth
    target can ever be locked; draws only when the target is visible.
    """
    target = next((p for p in persons_in_view if p.is_target), None)
    if target is None:
        return None
    return target if rng.random() < profile.id_success_p else None


class Tracker:
    """Skeleton-distance tracker: publishes one sample per tick once enabled
    and bound to a locked person."""

    def __init__(self):
        self.enabled = False
        self.locked: PersonId | None = None

    def step(
        self,
        rng: random.Random,
        noise: SensorNoise,
        fov: FovModel,
        robot_pose: Pose2D,
        user_pos: Point,
        tick: int,
    ) -> DistanceSample | None:
        """Measure the locked person, or None when not yet tracking."""
        if not self.enabled or self.locked is None:
            return None
        visible = in_fov(fov, robot_pose, user_pos)
        return sample_distance(noise, rng, true_distance(robot_pose, user_pos), visible, tick)
