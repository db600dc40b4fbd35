"""
Highlight cues for one frame: Score, Action and Distance, fused into Highlight.

    RHP       = (initial_hp - 0.5 * (hp1 + hp2)) / initial_hp
    Score     = (round_time / round_duration) * RHP
    Action    = 1/2 + 1/2**rank for ranked attacks, 1/2 for other attacks, else 0
    Distance  = 1 - |x1 - x2| / running max of |x1 - x2| in the round
    Highlight = w_s * Score + w_a * Action + w_d * Distance
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple

from commentator.errors import ConfigurationError, CueDomainError
from commentator.game_model import FrameSnapshot, LogEvent, PlayerState, RoundConfig, RoundStart

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RankActTable:
    """Ranked high-damage actions; rank 1 is the strongest."""

    entries: Tuple[Tuple[str, int], ...]
    skill_names: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        ranks = sorted(rank for _, rank in self.entries)
        if ranks != list(range(1, len(ranks) + 1)):
            raise ConfigurationError(f"RankAct ranks must be unique and contiguous from 1, got {ranks}")
        ids = [action_id for action_id, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("RankAct action ids must be unique")
        object.__setattr__(self, "_ranks", dict(self.entries))
        object.__setattr__(self, "_skill_names", dict(self.skill_names))

    @classmethod
    def default(cls) -> "RankActTable":
        return cls(
            entries=(
                ("STAND_D_DF_FC", 1),
                ("STAND_F_D_DFB", 2),
                ("STAND_D_DB_BB", 3),
                ("STAND_D_DF_FB", 4),
            ),
            skill_names=(
                ("STAND_D_DF_FC", "Special Skill"),
                ("STAND_F_D_DFB", "Strong Upper"),
                ("STAND_D_DB_BB", "Sliding Kick"),
                ("STAND_D_DF_FB", "Shoot Strong Projectile Forward"),
            ),
        )

    def rank_of(self, action_id: str) -> Optional[int]:
        return self._ranks.get(action_id)

    def __contains__(self, action_id: str) -> bool:
        return action_id in self._ranks

    @property
    def skill_name_map(self) -> Dict[str, str]:
        return self._skill_names


@dataclass(frozen=True)
class CueWeights:
    """Weights of the three cues; they must sum to 1."""

    w_s: float = 1.0 / 3.0
    w_a: float = 1.0 / 3.0
    w_d: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        for name in ("w_s", "w_a", "w_d"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must be within [0, 1], got {value}")
        total = self.w_s + self.w_a + self.w_d
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigurationError(f"Cue weights must sum to 1.0, got {total!r}")

    @classmethod
    def equal(cls) -> "CueWeights":
        return cls()


@dataclass(frozen=True, slots=True)
class HighlightCues:
    score: float
    action: float
    distance: float
    highlight: float


@dataclass(frozen=True, slots=True)
class RoundTracker:
    """Running maximum of the player separation within the current round."""

    max_abs_dx: float = 0.0

    def reset(self) -> "RoundTracker":
        return RoundTracker()


def rhp(hp1: int, hp2: int, initial_hp: int) -> float:
    """Normalized lost HP of both players: 0 at full health, 1 when both are at zero."""
    if initial_hp <= 0:
        raise ConfigurationError(f"initial_hp must be positive, got {initial_hp}")
    return (initial_hp - 0.5 * (hp1 + hp2)) / initial_hp


def score_cue(round_time_s: float, duration_s: float, rhp_value: float) -> float:
    if duration_s <= 0:
        raise ConfigurationError(f"round duration must be positive, got {duration_s}")
    return (round_time_s / duration_s) * rhp_value


def action_cue(action_id: str, is_attack: bool, table: RankActTable) -> float:
    # A ranked action counts even when the log does not flag it as an attack.
    rank = table.rank_of(action_id)
    if rank is not None:
        return 0.5 + 0.5**rank
    if is_attack:
        return 0.5
    return 0.0


def observe_distance(tracker: RoundTracker, x1: float, x2: float) -> RoundTracker:
    dx = abs(x1 - x2)
    if dx > tracker.max_abs_dx:
        return RoundTracker(max_abs_dx=dx)
    return tracker


def distance_cue(x1: float, x2: float, tracker: RoundTracker) -> Tuple[float, RoundTracker]:
    """
    Closeness of the players relative to the largest separation seen so far.

    Returns:
        (cue, updated tracker). Coincident players with no prior separation score 1.
    """
    tracker = observe_distance(tracker, x1, x2)
    if tracker.max_abs_dx == 0.0:
        return 1.0, tracker
    return 1.0 - abs(x1 - x2) / tracker.max_abs_dx, tracker


def highlight(score: float, action: float, distance: float, w: CueWeights) -> float:
    for name, value in (("score", score), ("action", action), ("distance", distance)):
        if not 0.0 <= value <= 1.0:
            raise CueDomainError(f"{name} cue {value!r} outside [0, 1]")
    value = w.w_s * score + w.w_a * action + w.w_d * distance
    return min(max(value, 0.0), 1.0)


def _frame_action(p1: PlayerState, p2: PlayerState, table: RankActTable) -> float:
    # Both players may attack on the same frame; the stronger move wins.
    return max(
        action_cue(p1.action_id, p1.is_attack, table),
        action_cue(p2.action_id, p2.is_attack, table),
    )


def evaluate_frame(
    snapshot: FrameSnapshot,
    config: RoundConfig,
    table: RankActTable,
    w: CueWeights,
    tracker: RoundTracker,
) -> Tuple[HighlightCues, RoundTracker]:
    """Compute all cues for a validated frame and thread the round tracker."""
    score = score_cue(
        snapshot.round_time_s,
        config.round_duration_s,
        rhp(snapshot.p1.hp, snapshot.p2.hp, config.initial_hp),
    )
    action = _frame_action(snapshot.p1, snapshot.p2, table)
    distance, tracker = distance_cue(snapshot.p1.x_pos, snapshot.p2.x_pos, tracker)
    cues = HighlightCues(
        score=score,
        action=action,
        distance=distance,
        highlight=highlight(score, action, distance, w),
    )
    return cues, tracker


def iter_cues(
    events: Iterable[LogEvent],
    config: RoundConfig,
    table: RankActTable,
    w: CueWeights,
) -> Iterator[Tuple[FrameSnapshot, HighlightCues]]:
    """Cues for every frame of a parsed log; the tracker resets at each RoundStart."""
    tracker = RoundTracker()
    for event in events:
        if isinstance(event, RoundStart):
            tracker = tracker.reset()
            continue
        cues, tracker = evaluate_frame(event, config, table, w, tracker)
        yield event, cues
