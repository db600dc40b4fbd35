"""
Synthetic frame traces for desk-scale testing.

Rounds last up to round_duration_s and end early when either HP reaches 0.
Both players random-walk, hold each action for a while, and attacks that start
within reach may land. HP never increases within a round.
"""

import random
from dataclasses import dataclass
from typing import Iterator, List, Tuple

from commentator.game_model import FrameSnapshot, PlayerState, RoundConfig, serialize_frame

MOVES = ("STAND", "FORWARD_WALK", "BACK_STEP", "DASH", "JUMP", "CROUCH", "STAND_GUARD")

# action id -> (damage, reach in game-units)
ATTACKS = {
    "STAND_A": (5, 120.0),
    "STAND_B": (10, 140.0),
    "STAND_FA": (8, 150.0),
    "STAND_FB": (12, 160.0),
    "CROUCH_A": (5, 110.0),
    "CROUCH_B": (10, 130.0),
    "CROUCH_FB": (15, 150.0),
    "THROW_A": (10, 80.0),
    "STAND_D_DF_FC": (120, 200.0),
    "STAND_F_D_DFB": (40, 140.0),
    "STAND_D_DB_BB": (30, 200.0),
    "STAND_D_DF_FB": (25, 960.0),
}

WALK_SPEED = 4.0
HIT_CHANCE = 0.6


@dataclass
class _Fighter:
    hp: int
    x: float
    action: str = "STAND"
    frames_left: int = 0

    @property
    def attacking(self) -> bool:
        return self.action in ATTACKS

    def state(self) -> PlayerState:
        return PlayerState(hp=self.hp, x_pos=self.x, action_id=self.action, is_attack=self.attacking)


def _next_action(rng: random.Random) -> Tuple[str, int]:
    if rng.random() < 0.35:
        return rng.choice(tuple(ATTACKS)), rng.randint(15, 45)
    return rng.choice(MOVES), rng.randint(10, 40)


def _step_position(fighter: _Fighter, opponent: _Fighter, rng: random.Random, width: float) -> None:
    toward = 1.0 if opponent.x >= fighter.x else -1.0
    if fighter.action in ("FORWARD_WALK", "DASH"):
        speed = WALK_SPEED * (3.0 if fighter.action == "DASH" else 1.0)
        fighter.x += toward * speed
    elif fighter.action == "BACK_STEP":
        fighter.x -= toward * WALK_SPEED * 2.0
    else:
        fighter.x += rng.uniform(-1.0, 1.0)
    fighter.x = min(max(fighter.x, 0.0), width)


def _advance(attacker: _Fighter, defender: _Fighter, rng: random.Random) -> None:
    if attacker.frames_left > 0:
        attacker.frames_left -= 1
        return
    attacker.action, attacker.frames_left = _next_action(rng)
    if attacker.attacking:
        damage, reach = ATTACKS[attacker.action]
        if abs(attacker.x - defender.x) <= reach and rng.random() < HIT_CHANCE:
            defender.hp = max(0, defender.hp - damage)


def generate_trace(
    duration_s: float, seed: int, config: RoundConfig = RoundConfig()
) -> Iterator[FrameSnapshot]:
    """
    Generate frames covering duration_s seconds of play.

    Frame indices are consecutive from 0; round time restarts at 0 each round.
    """
    rng = random.Random(seed)
    total_frames = int(round(duration_s * config.fps))
    frames_per_round = int(config.round_duration_s * config.fps)
    frame_index = 0
    round_index = 0

    while frame_index < total_frames:
        p1 = _Fighter(hp=config.initial_hp, x=config.stage_width * 0.25)
        p2 = _Fighter(hp=config.initial_hp, x=config.stage_width * 0.75)
        for tick in range(frames_per_round + 1):
            if frame_index >= total_frames:
                return
            if tick > 0:
                _advance(p1, p2, rng)
                _advance(p2, p1, rng)
                _step_position(p1, p2, rng, config.stage_width)
                _step_position(p2, p1, rng, config.stage_width)
            yield FrameSnapshot(
                frame_index=frame_index,
                round_time_s=min(tick / config.fps, config.round_duration_s),
                round_index=round_index,
                p1=p1.state(),
                p2=p2.state(),
            )
            frame_index += 1
            if p1.hp == 0 or p2.hp == 0:
                break
        round_index += 1


def generate_trace_lines(duration_s: float, seed: int, config: RoundConfig = RoundConfig()) -> List[bytes]:
    return [serialize_frame(frame) for frame in generate_trace(duration_s, seed, config)]
