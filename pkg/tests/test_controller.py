import pytest

from followme.controller import (
    ControllerConfig,
    FollowState,
    MotionClass,
    classify_distance,
    compute_command,
    lost_timeout_elapsed,
)
from followme.errors import ConfigError
from followme.fsm import FsmConfig, GuidancePhase as P

CFG = ControllerConfig(d_des=2.0, d_resume=1.8, v_nom=0.5, v_max=1.5)
MOVING = FollowState(paused=False)
PAUSED = FollowState(paused=True)


def test_config_invariants():
    with pytest.raises(ConfigError, match="d_resume"):
        ControllerConfig(d_des=2.0, d_resume=2.5)
    with pytest.raises(ConfigError, match="d_resume"):
        ControllerConfig(d_resume=0.0, d_des=2.0)
    with pytest.raises(ConfigError, match="v_nom"):
        ControllerConfig(v_nom=2.0, v_max=1.5)
    with pytest.raises(ConfigError, match="v_nom"):
        ControllerConfig(v_nom=0.0)


def test_exceeding_desired_distance_pauses():
    state, cls = classify_distance(CFG, MOVING, 2.5, True)
    assert state.paused and cls is MotionClass.PAUSED


def test_reapproach_resumes():
    state, cls = classify_distance(CFG, PAUSED, 1.5, True)
    assert not state.paused and cls is MotionClass.MOVING


def test_exactly_at_threshold_keeps_moving():
    state, _ = classify_distance(CFG, MOVING, 2.0, True)
    assert not state.paused


def test_band_keeps_paused():
    state, _ = classify_distance(CFG, PAUSED, 1.9, True)
    assert state.paused


def test_band_keeps_moving():
    state, _ = classify_distance(CFG, MOVING, 1.9, True)
    assert not state.paused


def test_invalid_samples_freeze_flag_and_count():
    state = PAUSED
    for expected in (1, 2, 3):
        state, cls = classify_distance(CFG, state, 0.0, False)
        assert state.paused and state.ticks_since_valid_sample == expected
        assert cls is MotionClass.PAUSED


def test_valid_sample_resets_counter():
    state = FollowState(paused=False, ticks_since_valid_sample=7)
    state, _ = classify_distance(CFG, state, 1.0, True)
    assert state.ticks_since_valid_sample == 0


def test_classification_is_pure():
    args = (CFG, FollowState(True, 2), 1.9, True)
    assert classify_distance(*args) == classify_distance(*args)
    assert FollowState(True, 2).ticks_since_valid_sample == 2  # input untouched


def test_no_chatter_on_monotone_crossing():
    # one clean crossing above d_des and back down: exactly one pause and one resume
    distances = [1.5 + 0.05 * i for i in range(20)] + [2.45 - 0.05 * i for i in range(20)]
    state = MOVING
    flips = 0
    prev = state.paused
    for d in distances:
        state, _ = classify_distance(CFG, state, d, True)
        if state.paused != prev:
            flips += 1
            prev = state.paused
    assert flips == 2


def test_commands_follow_phase_and_pause_flag():
    assert compute_command(CFG, P.GUIDING, MOVING).linear == 0.5
    assert compute_command(CFG, P.GUIDING, PAUSED).linear == 0.0
    assert compute_command(CFG, P.PAUSED, PAUSED).linear == 0.0
    assert compute_command(CFG, P.RETURNING_HOME, MOVING).linear == 0.5
    for phase in (P.IDLE, P.AWAITING_GESTURE, P.IDENTIFYING, P.ARRIVED, P.ABORTED):
        assert compute_command(CFG, phase, MOVING).linear == 0.0


def test_commands_respect_speed_bound_and_zero_angular():
    for phase in P:
        for state in (MOVING, PAUSED):
            cmd = compute_command(CFG, phase, state)
            assert abs(cmd.linear) <= CFG.v_max
            assert cmd.angular == 0.0


def test_lost_timeout_threshold():
    fsm_cfg = FsmConfig(lost_timeout=2.0)
    assert lost_timeout_elapsed(fsm_cfg, FollowState(False, 40), 0.05)  # 40 * 0.05 = 2.0
    assert not lost_timeout_elapsed(fsm_cfg, FollowState(False, 39), 0.05)
    assert not lost_timeout_elapsed(fsm_cfg, FollowState(False, 0), 0.05)
