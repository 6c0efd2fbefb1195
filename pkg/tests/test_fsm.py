import pytest

from followme.errors import ConfigError, ProtocolError
from followme.fsm import (
    DistanceUpdate,
    FsmConfig,
    GestureResult,
    GuidanceAction as A,
    GuidanceFsm,
    GuidancePhase as P,
    HomeReached,
    IdentityFailed,
    IdentityLocked,
    LostTimeout,
    PathCompleted,
    Tick,
)
from followme.sensors import PersonId

USER = PersonId("user", is_target=True)


def make_fsm(attempts=1, **kw):
    return GuidanceFsm(FsmConfig(gesture_attempts=attempts), **kw)


def started(attempts=1, **kw):
    fsm = make_fsm(attempts, **kw)
    fsm.start()
    return fsm


def drive(fsm, *events):
    result = None
    for e in events:
        result = fsm.step(e)
    return result


# --- construction and start -------------------------------------------------


def test_new_machine_is_idle():
    assert make_fsm().phase is P.IDLE


def test_zero_attempts_rejected():
    with pytest.raises(ConfigError, match="gesture_attempts"):
        FsmConfig(gesture_attempts=0)


def test_negative_lost_timeout_rejected():
    with pytest.raises(ConfigError, match="lost_timeout"):
        FsmConfig(lost_timeout=-1.0)


def test_bad_thresholds_rejected():
    with pytest.raises(ConfigError):
        GuidanceFsm(FsmConfig(), d_des=2.0, d_resume=2.5)


def test_start_requests_gesture_first():
    fsm = make_fsm()
    assert fsm.start() == (A.CALL_TRY_GESTURE,)
    assert fsm.phase is P.AWAITING_GESTURE


def test_start_twice_is_protocol_error():
    fsm = started()
    with pytest.raises(ProtocolError):
        fsm.start()


def test_start_while_guiding_is_protocol_error():
    fsm = started()
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    assert fsm.phase is P.GUIDING
    with pytest.raises(ProtocolError):
        fsm.start()


# --- the transition table, row by row ----------------------------------------


def test_gesture_accepted_enables_tracking_and_face_id():
    fsm = started()
    r = fsm.step(GestureResult(True))
    assert (r.phase, r.actions) == (P.IDENTIFYING, (A.ENABLE_TRACKER, A.CALL_FACE_ID))


def test_gesture_refused_with_attempts_left_retries():
    fsm = started(attempts=2)
    r = fsm.step(GestureResult(False))
    assert (r.phase, r.actions) == (P.AWAITING_GESTURE, (A.CALL_TRY_GESTURE,))


def test_gesture_refused_attempts_exhausted_goes_home():
    fsm = started(attempts=1)
    r = fsm.step(GestureResult(False))
    assert (r.phase, r.actions) == (P.RETURNING_HOME, (A.CALL_HOME_BASE,))


def test_attempts_budget_is_consumed_exactly():
    fsm = started(attempts=3)
    assert fsm.step(GestureResult(False)).phase is P.AWAITING_GESTURE
    assert fsm.step(GestureResult(False)).phase is P.AWAITING_GESTURE
    assert fsm.step(GestureResult(False)).phase is P.RETURNING_HOME


def test_identity_locked_starts_guiding():
    fsm = started()
    fsm.step(GestureResult(True))
    r = fsm.step(IdentityLocked(USER))
    assert (r.phase, r.actions) == (P.GUIDING, (A.COMMAND_FOLLOW,))


def test_identity_failed_goes_home():
    fsm = started()
    fsm.step(GestureResult(True))
    r = fsm.step(IdentityFailed())
    assert (r.phase, r.actions) == (P.RETURNING_HOME, (A.CALL_HOME_BASE,))


def test_distance_above_desired_pauses():
    fsm = started(d_des=2.0, d_resume=1.8)
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    r = fsm.step(DistanceUpdate(2.5, True))
    assert (r.phase, r.actions) == (P.PAUSED, (A.COMMAND_PAUSE,))


def test_reapproach_below_resume_level_resumes():
    fsm = started(d_des=2.0, d_resume=1.8)
    drive(fsm, GestureResult(True), IdentityLocked(USER), DistanceUpdate(2.5, True))
    r = fsm.step(DistanceUpdate(1.5, True))
    assert (r.phase, r.actions) == (P.GUIDING, (A.COMMAND_FOLLOW,))


def test_hysteresis_band_changes_nothing():
    fsm = started(d_des=2.0, d_resume=1.8)
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    assert fsm.step(DistanceUpdate(2.0, True)).phase is P.GUIDING  # exceeded is strict
    fsm.step(DistanceUpdate(2.5, True))
    r = fsm.step(DistanceUpdate(1.9, True))  # inside the band, stays paused
    assert (r.phase, r.actions) == (P.PAUSED, ())


def test_invalid_distance_updates_are_ignored():
    fsm = started()
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    r = fsm.step(DistanceUpdate(99.0, False))
    assert (r.phase, r.actions) == (P.GUIDING, ())


@pytest.mark.parametrize("pre_pause", [False, True])
def test_lost_timeout_goes_home_from_guiding_and_paused(pre_pause):
    fsm = started()
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    if pre_pause:
        fsm.step(DistanceUpdate(2.5, True))
    r = fsm.step(LostTimeout())
    assert (r.phase, r.actions) == (P.RETURNING_HOME, (A.CALL_HOME_BASE,))


def test_path_completed_arrives():
    fsm = started()
    drive(fsm, GestureResult(True), IdentityLocked(USER))
    r = fsm.step(PathCompleted())
    assert (r.phase, r.actions) == (P.ARRIVED, (A.HALT,))


def test_home_reached_aborts():
    fsm = started(attempts=1)
    fsm.step(GestureResult(False))
    r = fsm.step(HomeReached())
    assert (r.phase, r.actions) == (P.ABORTED, (A.HALT,))


# --- ignoring, terminality, ordering ----------------------------------------


def test_unexpected_pairs_are_silently_ignored():
    fsm = started()
    for event in (IdentityLocked(USER), PathCompleted(), HomeReached(), Tick()):
        r = fsm.step(event)
        assert (r.phase, r.actions, r.ignored_terminal) == (P.AWAITING_GESTURE, (), False)


@pytest.mark.parametrize("terminal_events", [(PathCompleted(),), (LostTimeout(), HomeReached())])
def test_terminal_phases_ignore_events_with_flag(terminal_events):
    fsm = started()
    drive(fsm, GestureResult(True), IdentityLocked(USER), *terminal_events)
    assert fsm.phase in (P.ARRIVED, P.ABORTED)
    r = fsm.step(DistanceUpdate(5.0, True))
    assert r.actions == ()
    assert r.ignored_terminal


def test_event_ticks_must_not_regress():
    fsm = started()
    fsm.step(GestureResult(True, tick=10))
    with pytest.raises(ProtocolError):
        fsm.step(IdentityLocked(USER, tick=9))


def test_step_is_deterministic():
    def transcript():
        fsm = started(attempts=2)
        events = [
            GestureResult(False, 1),
            GestureResult(True, 2),
            IdentityLocked(USER, 3),
            DistanceUpdate(2.4, True, 4),
            DistanceUpdate(1.7, True, 5),
            PathCompleted(6),
        ]
        return [fsm.step(e) for e in events]

    assert transcript() == transcript()


def test_every_phase_is_reachable():
    # Idle, AwaitingGesture, Identifying, Guiding, Paused, Arrived via one run
    fsm = make_fsm()
    seen = {fsm.phase}
    fsm.start()
    seen.add(fsm.phase)
    for e in (GestureResult(True), IdentityLocked(USER), DistanceUpdate(3.0, True),
              DistanceUpdate(1.0, True), PathCompleted()):
        fsm.step(e)
        seen.add(fsm.phase)
    # ReturningHome and Aborted via a refusal run
    fsm2 = started(attempts=1)
    fsm2.step(GestureResult(False))
    seen.add(fsm2.phase)
    fsm2.step(HomeReached())
    seen.add(fsm2.phase)
    assert seen == set(P)
