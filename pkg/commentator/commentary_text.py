"""
Commentary text: game-event detection, template selection and rendering.

Templates are f-string style prompt templates with a fixed placeholder
vocabulary: {P1}, {P2}, {ATTACKER}, {DEFENDER}, {SKILL}.
"""

import functools
import json
import logging
import random
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from langchain_core.prompts import PromptTemplate
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from commentator.errors import ConfigurationError, FrameSequenceError, RenderError
from commentator.game_model import FrameSnapshot, PlayerState, RoundConfig
from commentator.highlight_engine import HighlightCues, RankActTable

logger = logging.getLogger(__name__)

PLACEHOLDERS = frozenset({"P1", "P2", "ATTACKER", "DEFENDER", "SKILL"})
ATTACKER_PLACEHOLDERS = frozenset({"ATTACKER", "DEFENDER", "SKILL"})

LOW_BAND = (0.0, 1.0 / 3.0)
MID_BAND = (1.0 / 3.0, 2.0 / 3.0)
HIGH_BAND = (2.0 / 3.0, 1.0)


class GameEventKind(str, Enum):
    ATTACK_STARTED = "AttackStarted"
    RANKED_ATTACK_STARTED = "RankedAttackStarted"
    HIT_LANDED = "HitLanded"
    BIG_HP_DROP = "BigHpDrop"
    ROUND_NEAR_END = "RoundNearEnd"
    CLOSE_QUARTERS = "CloseQuarters"
    NEUTRAL = "Neutral"


# Kinds whose events name an attacker; ordered by how strongly they claim the line.
ATTACKER_EVENT_KINDS = (
    GameEventKind.BIG_HP_DROP,
    GameEventKind.HIT_LANDED,
    GameEventKind.RANKED_ATTACK_STARTED,
    GameEventKind.ATTACK_STARTED,
)


class Side(str, Enum):
    P1 = "P1"
    P2 = "P2"

    @property
    def opponent(self) -> "Side":
        return Side.P2 if self is Side.P1 else Side.P1


@dataclass(frozen=True)
class GameEvent:
    kind: GameEventKind
    attacker: Optional[Side] = None
    skill_name: str = ""


NEUTRAL_EVENT = GameEvent(GameEventKind.NEUTRAL)


class EventThresholds(BaseModel):
    model_config = ConfigDict(frozen=True)

    big_hp_drop: int = Field(default=30, gt=0)
    round_near_end: float = Field(default=0.8, ge=0.0, le=1.0)
    close_quarters: float = Field(default=0.9, ge=0.0, le=1.0)


class PlayerNames(BaseModel):
    model_config = ConfigDict(frozen=True)

    p1: str = "Garnet"
    p2: str = "Zen"

    def of(self, side: Side) -> str:
        return self.p1 if side is Side.P1 else self.p2


_DEFAULT_RANK_TABLE = RankActTable.default()

_BASIC_SKILL_NAMES = {
    "STAND_A": "Light Punch",
    "STAND_B": "Heavy Kick",
    "STAND_FA": "Forward Punch",
    "STAND_FB": "Forward Kick",
    "CROUCH_A": "Crouching Punch",
    "CROUCH_B": "Low Kick",
    "CROUCH_FA": "Upper Punch",
    "CROUCH_FB": "Sweep",
    "AIR_A": "Air Punch",
    "AIR_B": "Air Kick",
    "THROW_A": "Throw",
    "THROW_B": "Heavy Throw",
    "STAND_D_DF_FA": "Projectile",
}


def skill_display_name(action_id: str, table: Optional[RankActTable] = None) -> str:
    """Display name of an action id, e.g. STAND_D_DF_FC -> "Special Skill"."""
    names = (table or _DEFAULT_RANK_TABLE).skill_name_map
    if action_id in names:
        return names[action_id]
    if action_id in _BASIC_SKILL_NAMES:
        return _BASIC_SKILL_NAMES[action_id]
    return action_id.replace("_", " ").title()


@functools.lru_cache(maxsize=None)
def _prompt_for(pattern: str) -> PromptTemplate:
    return PromptTemplate.from_template(pattern)


class Template(BaseModel):
    """One commentary sentence with event tags and a highlight band."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    id: int
    pattern: str = Field(min_length=1)
    event_tags: FrozenSet[GameEventKind] = Field(alias="tags", min_length=1)
    highlight_band: Tuple[float, float] = Field(alias="band", default=(0.0, 1.0))

    @field_validator("pattern")
    @classmethod
    def check_placeholders(cls, pattern: str) -> str:
        try:
            variables = set(_prompt_for(pattern).input_variables)
        except (ValueError, KeyError) as e:
            raise ValueError(f"unparseable pattern: {e}") from e
        unknown = variables - PLACEHOLDERS
        if unknown:
            raise ValueError(f"unknown placeholders: {sorted(unknown)}")
        sample = _prompt_for(pattern).format(**{name: "x" for name in variables})
        if "{" in sample or "}" in sample:
            raise ValueError("pattern leaves literal braces after substitution")
        return pattern

    @model_validator(mode="after")
    def check_band_and_tags(self) -> "Template":
        lo, hi = self.highlight_band
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"band [{lo}, {hi}] is not a non-empty subinterval of [0, 1]")
        needs_attacker = self.placeholders & ATTACKER_PLACEHOLDERS
        if needs_attacker and (
            GameEventKind.NEUTRAL in self.event_tags
            or not self.event_tags.intersection(ATTACKER_EVENT_KINDS)
        ):
            raise ValueError(
                f"placeholders {sorted(needs_attacker)} need an attacking event tag and no Neutral tag"
            )
        return self

    @property
    def placeholders(self) -> FrozenSet[str]:
        return frozenset(_prompt_for(self.pattern).input_variables)

    def band_contains(self, h: float) -> bool:
        lo, hi = self.highlight_band
        # Bands are half-open except at the top of the scale.
        return lo <= h < hi or (hi == 1.0 and h == 1.0)


def load_templates(lines: Iterable[str]) -> List[Template]:
    """Parse a template library from JSONL lines."""
    templates = []
    seen = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            template = Template.model_validate_json(line)
        except ValidationError as e:
            raise ConfigurationError(f"template line {line_number}: {e}") from e
        if template.id in seen:
            raise ConfigurationError(f"template line {line_number}: duplicate id {template.id}")
        seen.add(template.id)
        templates.append(template)
    return templates


def load_template_file(path: Path) -> List[Template]:
    with open(path, "r", encoding="utf-8") as f:
        return load_templates(f)


def load_default_templates() -> List[Template]:
    text = resources.files("commentator.data").joinpath("templates.jsonl").read_text("utf-8")
    return load_templates(text.splitlines())


def dump_template(template: Template) -> str:
    return json.dumps(
        {
            "id": template.id,
            "pattern": template.pattern,
            "tags": sorted(tag.value for tag in template.event_tags),
            "band": list(template.highlight_band),
        }
    )


# ---------------------------------------------------------------------------
# Event detection
# ---------------------------------------------------------------------------


def _attack_started(prev: PlayerState, curr: PlayerState) -> bool:
    return curr.is_attack and (not prev.is_attack or prev.action_id != curr.action_id)


def _hit_skill(prev: PlayerState, curr: PlayerState, table: RankActTable) -> str:
    """Name of the attack that landed; empty when neither frame shows one."""
    for state in (curr, prev):
        if state.is_attack or state.action_id in table:
            return skill_display_name(state.action_id, table)
    return ""


def detect_events(
    prev: FrameSnapshot,
    curr: FrameSnapshot,
    cues: HighlightCues,
    table: RankActTable,
    thresholds: EventThresholds,
    config: RoundConfig,
) -> List[GameEvent]:
    """
    Derive the game events between two consecutive frames of one round.

    Raises:
        FrameSequenceError: frames are from different rounds or not consecutive
    """
    if prev.round_index != curr.round_index or curr.frame_index != prev.frame_index + 1:
        raise FrameSequenceError(
            f"frames {prev.frame_index} (round {prev.round_index}) and "
            f"{curr.frame_index} (round {curr.round_index}) are not consecutive"
        )

    events: List[GameEvent] = []
    sides = ((Side.P1, prev.p1, curr.p1), (Side.P2, prev.p2, curr.p2))

    for side, before, after in sides:
        is_ranked = after.action_id in table
        if (is_ranked and (before.action_id != after.action_id)) or _attack_started(before, after):
            kind = GameEventKind.RANKED_ATTACK_STARTED if is_ranked else GameEventKind.ATTACK_STARTED
            events.append(GameEvent(kind, side, skill_display_name(after.action_id, table)))

    for side, before, after in sides:
        drop = before.hp - after.hp
        if drop <= 0:
            continue
        attacker = side.opponent
        skill = _hit_skill(
            prev.p1 if attacker is Side.P1 else prev.p2,
            curr.p1 if attacker is Side.P1 else curr.p2,
            table,
        )
        events.append(GameEvent(GameEventKind.HIT_LANDED, attacker, skill))
        if drop >= thresholds.big_hp_drop:
            events.append(GameEvent(GameEventKind.BIG_HP_DROP, attacker, skill))

    if curr.round_time_s / config.round_duration_s >= thresholds.round_near_end:
        events.append(GameEvent(GameEventKind.ROUND_NEAR_END))
    if cues.distance >= thresholds.close_quarters:
        events.append(GameEvent(GameEventKind.CLOSE_QUARTERS))

    return events or [NEUTRAL_EVENT]


def is_neutral(events: Sequence[GameEvent]) -> bool:
    return all(event.kind is GameEventKind.NEUTRAL for event in events)


# ---------------------------------------------------------------------------
# Selection and rendering
# ---------------------------------------------------------------------------


def _candidates(
    events: Sequence[GameEvent], h: float, lib: Sequence[Template]
) -> List[Template]:
    kinds = {event.kind for event in events}
    tagged = [t for t in lib if t.event_tags & kinds]
    banded = [t for t in tagged if t.band_contains(h)]
    if banded:
        return banded
    if tagged:
        return tagged
    neutral = [t for t in lib if GameEventKind.NEUTRAL in t.event_tags]
    banded_neutral = [t for t in neutral if t.band_contains(h)]
    return banded_neutral or neutral or list(lib)


def select_template(
    events: Sequence[GameEvent],
    h: float,
    lib: Sequence[Template],
    rng: random.Random,
    previous_id: Optional[int] = None,
    usable: Optional[Callable[[Template], bool]] = None,
) -> Template:
    """
    Pick a template for the events at highlight h.

    Candidates are templates tagged with one of the event kinds whose band holds h;
    failing that the band is dropped, then Neutral templates are used. The previous
    template is never repeated when another candidate exists. When usable is given,
    only templates it accepts are considered.
    """
    if not lib:
        raise ConfigurationError("template library is empty")
    pool = [t for t in lib if usable(t)] if usable is not None else list(lib)
    if not pool:
        raise ConfigurationError("no template in the library can be rendered for these events")
    candidates = sorted(_candidates(events, h, pool), key=lambda t: t.id)
    if len(candidates) >= 2 and previous_id is not None:
        candidates = [t for t in candidates if t.id != previous_id]
    return rng.choice(candidates)


class TemplateSelector:
    """Seeded selection state: the RNG and the previously used template id."""

    def __init__(self, lib: Sequence[Template], seed: int = 0):
        if not lib:
            raise ConfigurationError("template library is empty")
        self.lib = list(lib)
        self.rng = random.Random(seed)
        self.previous_id: Optional[int] = None

    def select(
        self,
        events: Sequence[GameEvent],
        h: float,
        usable: Optional[Callable[[Template], bool]] = None,
    ) -> Template:
        template = select_template(events, h, self.lib, self.rng, self.previous_id, usable)
        self.previous_id = template.id
        return template


def _context_event(
    events: Sequence[GameEvent], template: Optional[Template]
) -> Optional[GameEvent]:
    attacking = sorted(
        (e for e in events if e.attacker is not None and e.kind in ATTACKER_EVENT_KINDS),
        key=lambda e: ATTACKER_EVENT_KINDS.index(e.kind),
    )
    if template is not None:
        attacking = [e for e in attacking if e.kind in template.event_tags] or attacking
    return attacking[0] if attacking else None


def event_context(
    events: Sequence[GameEvent], names: PlayerNames, template: Optional[Template] = None
) -> Dict[str, str]:
    """
    Placeholder values for rendering.

    ATTACKER, DEFENDER and SKILL come from the strongest attacking event, preferring
    events whose kind the template is tagged with (a HitLanded line names whoever
    landed the hit, even if the other player started an attack on the same frame).
    """
    context = {"P1": names.p1, "P2": names.p2}
    event = _context_event(events, template)
    if event is not None:
        context["ATTACKER"] = names.of(event.attacker)
        context["DEFENDER"] = names.of(event.attacker.opponent)
        if event.skill_name:
            context["SKILL"] = event.skill_name
    return context


def is_renderable(template: Template, events: Sequence[GameEvent], names: PlayerNames) -> bool:
    return template.placeholders <= event_context(events, names, template).keys()


def render(template: Template, names: PlayerNames, context: Mapping[str, str]) -> str:
    """
    Substitute every placeholder of the template.

    Args:
        template: Template to render
        names: Display names of P1 and P2
        context: ATTACKER / DEFENDER / SKILL values (P1 and P2 default to names)

    Raises:
        RenderError: a placeholder has no value, or braces survive substitution
    """
    values = {"P1": names.p1, "P2": names.p2, **context}
    prompt = _prompt_for(template.pattern)
    for variable in prompt.input_variables:
        if variable not in values:
            raise RenderError(variable)
    text = prompt.format(**{name: values[name] for name in prompt.input_variables})
    if "{" in text or "}" in text:
        raise RenderError("", f"template {template.id} rendered with stray braces")
    return text
