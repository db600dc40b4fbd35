"""
Tests for the frame-log data model and parser.
"""

import io
import random

import pytest

from commentator.errors import (
    FrameLogError,
    FrameParseError,
    FrameSequenceError,
    FrameValidationError,
)
from commentator.game_model import (
    FrameSnapshot,
    PlayerState,
    RoundConfig,
    RoundStart,
    iter_log_events,
    parse_frame_log,
    serialize_frame,
    validate_frame,
)
from commentator.trace_gen import generate_trace_lines

CONFIG = RoundConfig()


def make_line(frame, t=0.0, round_index=0, hp1=200, hp2=200, x1=100.0, x2=500.0) -> bytes:
    snapshot = FrameSnapshot(
        frame_index=frame,
        round_time_s=t,
        round_index=round_index,
        p1=PlayerState(hp=hp1, x_pos=x1, action_id="STAND", is_attack=False),
        p2=PlayerState(hp=hp2, x_pos=x2, action_id="STAND", is_attack=False),
    )
    return serialize_frame(snapshot)


def valid_snapshot(**overrides) -> FrameSnapshot:
    values = dict(
        frame_index=0,
        round_time_s=0.0,
        round_index=0,
        p1=PlayerState(hp=200, x_pos=100.0, action_id="STAND", is_attack=False),
        p2=PlayerState(hp=200, x_pos=500.0, action_id="STAND", is_attack=False),
    )
    values.update(overrides)
    return FrameSnapshot(**values)


def test_round_config_defaults():
    assert CONFIG.initial_hp == 200
    assert CONFIG.round_duration_s == 60.0
    assert CONFIG.fps == 60.0
    assert CONFIG.stage_width == 960.0


@pytest.mark.parametrize("field", ["initial_hp", "round_duration_s", "fps", "stage_width"])
def test_round_config_rejects_non_positive(field):
    with pytest.raises(ValueError):
        RoundConfig(**{field: 0})


def test_empty_input_yields_nothing():
    assert list(parse_frame_log(io.BytesIO(b""), CONFIG)) == []


def test_single_line():
    frames = list(parse_frame_log(io.BytesIO(make_line(0) + b"\n"), CONFIG))
    assert len(frames) == 1
    assert frames[0].round_time_s == 0.0
    assert frames[0].p1.hp == 200 and frames[0].p2.hp == 200


def test_out_of_order_frame_reports_line_two():
    log = b"\n".join([make_line(5), make_line(4), make_line(6)])
    with pytest.raises(FrameSequenceError) as excinfo:
        list(parse_frame_log(io.BytesIO(log), CONFIG))
    assert excinfo.value.line_number == 2
    assert "line 2" in str(excinfo.value)


def test_decreasing_round_index_is_a_sequencing_error():
    log = [make_line(0, round_index=1), make_line(1, round_index=0)]
    with pytest.raises(FrameSequenceError):
        list(parse_frame_log(log, CONFIG))


def test_malformed_line_is_parse_error():
    log = [make_line(0), b'{"frame": 1, "round": 0}']
    with pytest.raises(FrameParseError) as excinfo:
        list(parse_frame_log(log, CONFIG))
    assert excinfo.value.line_number == 2


def test_unknown_field_is_rejected():
    line = make_line(0).replace(b'"frame":0', b'"frame":0,"extra":1')
    with pytest.raises(FrameParseError):
        list(parse_frame_log([line], CONFIG))


def test_out_of_range_field_is_validation_error():
    with pytest.raises(FrameValidationError) as excinfo:
        list(parse_frame_log([make_line(0, hp1=250)], CONFIG))
    assert any("hp exceeds initial_hp" in v for v in excinfo.value.violations)


def test_blank_lines_are_skipped_but_counted():
    log = [make_line(0), b"   ", make_line(0)]
    with pytest.raises(FrameSequenceError) as excinfo:
        list(parse_frame_log(log, CONFIG))
    assert excinfo.value.line_number == 3


def test_validate_frame_hp_exceeds_initial():
    violations = validate_frame(
        valid_snapshot(p1=PlayerState(hp=250, x_pos=100.0, action_id="STAND", is_attack=False)), CONFIG
    )
    assert len(violations) == 1
    assert "hp exceeds initial_hp" in violations[0]


def test_validate_frame_round_time_over_duration():
    violations = validate_frame(valid_snapshot(round_time_s=61.0), CONFIG)
    assert violations and "round_time_s" in violations[0]


def test_validate_frame_ok():
    assert validate_frame(valid_snapshot(), CONFIG) == []


def test_validate_frame_reports_every_violation():
    snapshot = valid_snapshot(
        round_time_s=-1.0,
        p1=PlayerState(hp=-5, x_pos=2000.0, action_id="", is_attack=False),
    )
    assert len(validate_frame(snapshot, CONFIG)) == 4


def test_round_start_markers():
    log = [
        make_line(0, t=0.0),
        make_line(1, t=1.0),
        make_line(2, t=0.0),  # clock restarts
        make_line(3, t=0.5, round_index=1),
        make_line(4, t=1.0, round_index=1),
    ]
    events = list(iter_log_events(log, CONFIG))
    markers = [e for e in events if isinstance(e, RoundStart)]
    assert [(m.round_index, m.frame_index) for m in markers] == [(0, 0), (0, 2), (1, 3)]
    assert isinstance(events[0], RoundStart)
    assert sum(isinstance(e, FrameSnapshot) for e in events) == 5


def test_serialize_round_trip():
    for line in generate_trace_lines(10.0, seed=3):
        (snapshot,) = list(parse_frame_log([line], CONFIG))
        assert serialize_frame(snapshot) == line


def test_canonical_key_order():
    assert make_line(7, t=1.5).startswith(b'{"frame":7,"round":0,"t":1.5,"p1":{"hp":200,"x":100.0,')


def test_arbitrary_bytes_never_crash():
    rng = random.Random(1234)
    seed_line = make_line(0)
    for _ in range(500):
        if rng.random() < 0.5:
            data = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 80)))
        else:
            data = bytearray(seed_line)
            for _ in range(rng.randrange(1, 5)):
                data[rng.randrange(len(data))] = rng.randrange(256)
            data = bytes(data)
        try:
            list(parse_frame_log(io.BytesIO(data), CONFIG))
        except FrameLogError:
            pass
