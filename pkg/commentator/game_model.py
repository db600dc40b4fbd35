"""
Telemetry data model and the JSONL frame-log parser.

One log line holds one frame:
    {"frame":int,"round":int,"t":float,"p1":{"hp":int,"x":float,"action":str,"attack":bool},"p2":{...}}
"""

import json
import logging
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, List, Optional, Union

from pydantic import BaseModel, ConfigDict, PositiveFloat, PositiveInt, ValidationError

from commentator.errors import FrameParseError, FrameSequenceError, FrameValidationError

logger = logging.getLogger(__name__)


class RoundConfig(BaseModel):
    """Round rules: 200 HP, 60 second rounds rendered at 60 fps."""

    model_config = ConfigDict(frozen=True)

    initial_hp: PositiveInt = 200
    round_duration_s: PositiveFloat = 60.0
    fps: PositiveFloat = 60.0
    # Only used for validation, no cue depends on it.
    stage_width: PositiveFloat = 960.0


@dataclass(frozen=True, slots=True)
class PlayerState:
    hp: int
    x_pos: float
    action_id: str
    is_attack: bool


@dataclass(frozen=True, slots=True)
class FrameSnapshot:
    frame_index: int
    round_time_s: float
    round_index: int
    p1: PlayerState
    p2: PlayerState


@dataclass(frozen=True, slots=True)
class RoundStart:
    """Marker emitted before the first frame of every round."""

    round_index: int
    frame_index: int


LogEvent = Union[RoundStart, FrameSnapshot]


class _PlayerRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)

    hp: int
    x: float
    action: str
    attack: bool

    def to_state(self) -> PlayerState:
        return PlayerState(hp=self.hp, x_pos=self.x, action_id=self.action, is_attack=self.attack)


class _FrameRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)

    frame: int
    round: int
    t: float
    p1: _PlayerRecord
    p2: _PlayerRecord

    def to_snapshot(self) -> FrameSnapshot:
        return FrameSnapshot(
            frame_index=self.frame,
            round_time_s=self.t,
            round_index=self.round,
            p1=self.p1.to_state(),
            p2=self.p2.to_state(),
        )


def _player_violations(label: str, player: PlayerState, config: RoundConfig) -> List[str]:
    violations = []
    if player.hp < 0:
        violations.append(f"{label} hp is negative")
    if player.hp > config.initial_hp:
        violations.append(f"{label} hp exceeds initial_hp ({player.hp} > {config.initial_hp})")
    if not 0.0 <= player.x_pos <= config.stage_width:
        violations.append(f"{label} x_pos {player.x_pos} outside [0, {config.stage_width}]")
    if not player.action_id:
        violations.append(f"{label} action is empty")
    return violations


def validate_frame(snapshot: FrameSnapshot, config: RoundConfig) -> List[str]:
    """
    Check one frame against the telemetry invariants.

    Returns:
        Every violated invariant; an empty list means the frame is valid.
    """
    violations = []
    if snapshot.frame_index < 0:
        violations.append("frame_index is negative")
    if snapshot.round_index < 0:
        violations.append("round_index is negative")
    if not 0.0 <= snapshot.round_time_s <= config.round_duration_s:
        violations.append(
            f"round_time_s {snapshot.round_time_s} outside [0, {config.round_duration_s}]"
        )
    violations.extend(_player_violations("p1", snapshot.p1, config))
    violations.extend(_player_violations("p2", snapshot.p2, config))
    return violations


def _parse_line(raw: Union[bytes, str], line_number: int) -> FrameSnapshot:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FrameParseError(f"not valid UTF-8 ({e.reason})", line_number) from e
    try:
        record = _FrameRecord.model_validate_json(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "record"
        raise FrameParseError(f"{where}: {first['msg']}", line_number) from e
    return record.to_snapshot()


def iter_log_events(
    stream: Union[BinaryIO, Iterable[Union[bytes, str]]], config: RoundConfig
) -> Iterator[LogEvent]:
    """
    Parse a frame log lazily, yielding a RoundStart marker before each round.

    A round starts on the first frame, whenever round_index increases, and
    whenever round_time_s goes backwards.

    Raises:
        FrameParseError: malformed line
        FrameSequenceError: frame_index not strictly increasing, or round_index decreasing
        FrameValidationError: field out of range
    """
    previous: Optional[FrameSnapshot] = None
    for line_number, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        snapshot = _parse_line(raw, line_number)

        violations = validate_frame(snapshot, config)
        if violations:
            raise FrameValidationError(violations, line_number)

        if previous is not None:
            if snapshot.frame_index <= previous.frame_index:
                raise FrameSequenceError(
                    f"frame {snapshot.frame_index} does not follow frame {previous.frame_index}",
                    line_number,
                )
            if snapshot.round_index < previous.round_index:
                raise FrameSequenceError(
                    f"round {snapshot.round_index} after round {previous.round_index}",
                    line_number,
                )

        if (
            previous is None
            or snapshot.round_index != previous.round_index
            or snapshot.round_time_s < previous.round_time_s
        ):
            logger.debug("Round %d starts at frame %d", snapshot.round_index, snapshot.frame_index)
            yield RoundStart(round_index=snapshot.round_index, frame_index=snapshot.frame_index)

        yield snapshot
        previous = snapshot


def parse_frame_log(
    stream: Union[BinaryIO, Iterable[Union[bytes, str]]], config: RoundConfig
) -> Iterator[FrameSnapshot]:
    """Parse a frame log lazily, yielding validated snapshots only."""
    for event in iter_log_events(stream, config):
        if isinstance(event, FrameSnapshot):
            yield event


def _player_dict(player: PlayerState) -> dict:
    return {
        "hp": player.hp,
        "x": float(player.x_pos),
        "action": player.action_id,
        "attack": player.is_attack,
    }


def serialize_frame(snapshot: FrameSnapshot) -> bytes:
    """Serialize one snapshot to its canonical log line (no trailing newline)."""
    record = {
        "frame": snapshot.frame_index,
        "round": snapshot.round_index,
        "t": float(snapshot.round_time_s),
        "p1": _player_dict(snapshot.p1),
        "p2": _player_dict(snapshot.p2),
    }
    return json.dumps(record, separators=(",", ":")).encode("utf-8")
