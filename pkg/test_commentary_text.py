"""
Tests for event detection, template selection and rendering.
"""

import json
import random

import pytest

from commentator.commentary_text import (
    NEUTRAL_EVENT,
    EventThresholds,
    GameEvent,
    GameEventKind,
    PlayerNames,
    Side,
    Template,
    TemplateSelector,
    detect_events,
    dump_template,
    event_context,
    is_renderable,
    load_default_templates,
    load_templates,
    render,
    select_template,
    skill_display_name,
)
from commentator.errors import ConfigurationError, FrameSequenceError, RenderError
from commentator.game_model import FrameSnapshot, PlayerState, RoundConfig
from commentator.highlight_engine import HighlightCues, RankActTable

CONFIG = RoundConfig()
TABLE = RankActTable.default()
THRESHOLDS = EventThresholds()
NAMES = PlayerNames()
FAR = HighlightCues(score=0.0, action=0.0, distance=0.1, highlight=0.03)


def player(hp=200, x=100.0, action="STAND", attack=False) -> PlayerState:
    return PlayerState(hp=hp, x_pos=x, action_id=action, is_attack=attack)


def frame(index, t=10.0, p1=None, p2=None, round_index=0) -> FrameSnapshot:
    return FrameSnapshot(
        frame_index=index,
        round_time_s=t,
        round_index=round_index,
        p1=p1 or player(),
        p2=p2 or player(x=800.0),
    )


def template(id, pattern="Line {P1}", tags=("Neutral",), band=(0.0, 1.0)) -> Template:
    return Template.model_validate({"id": id, "pattern": pattern, "tags": list(tags), "band": list(band)})


def kinds(events):
    return {event.kind for event in events}


def test_identical_frames_are_neutral():
    assert detect_events(frame(0), frame(1), FAR, TABLE, THRESHOLDS, CONFIG) == [NEUTRAL_EVENT]


def test_big_hp_drop_credits_attacker():
    prev = frame(0, p2=player(hp=200, x=800.0))
    curr = frame(1, p1=player(action="STAND_B", attack=True), p2=player(hp=160, x=800.0))
    events = detect_events(prev, curr, FAR, TABLE, THRESHOLDS, CONFIG)
    assert GameEvent(GameEventKind.HIT_LANDED, Side.P1, "Heavy Kick") in events
    assert GameEvent(GameEventKind.BIG_HP_DROP, Side.P1, "Heavy Kick") in events


def test_hit_skill_comes_from_an_attack():
    recovering = frame(1, p2=player(hp=190, x=800.0))
    events = detect_events(
        frame(0, p1=player(action="CROUCH_FB", attack=True)), recovering, FAR, TABLE, THRESHOLDS, CONFIG
    )
    assert events == [GameEvent(GameEventKind.HIT_LANDED, Side.P1, "Sweep")]

    events = detect_events(frame(0), recovering, FAR, TABLE, THRESHOLDS, CONFIG)
    assert events == [GameEvent(GameEventKind.HIT_LANDED, Side.P1, "")]


def test_small_hp_drop_is_only_a_hit():
    events = detect_events(
        frame(0), frame(1, p1=player(hp=190)), FAR, TABLE, THRESHOLDS, CONFIG
    )
    assert kinds(events) == {GameEventKind.HIT_LANDED}
    assert events[0].attacker is Side.P2


def test_ranked_attack_started():
    curr = frame(1, p1=player(action="STAND_D_DF_FC", attack=True))
    events = detect_events(frame(0), curr, FAR, TABLE, THRESHOLDS, CONFIG)
    assert GameEvent(GameEventKind.RANKED_ATTACK_STARTED, Side.P1, "Special Skill") in events


def test_plain_attack_started_only_on_onset():
    attacking = player(action="STAND_B", attack=True)
    started = detect_events(frame(0), frame(1, p1=attacking), FAR, TABLE, THRESHOLDS, CONFIG)
    held = detect_events(frame(1, p1=attacking), frame(2, p1=attacking), FAR, TABLE, THRESHOLDS, CONFIG)
    assert GameEvent(GameEventKind.ATTACK_STARTED, Side.P1, "Heavy Kick") in started
    assert held == [NEUTRAL_EVENT]


def test_round_near_end_and_close_quarters():
    close = HighlightCues(score=0.5, action=0.0, distance=0.95, highlight=0.48)
    events = detect_events(frame(0, t=50.0), frame(1, t=50.1), close, TABLE, THRESHOLDS, CONFIG)
    assert kinds(events) == {GameEventKind.ROUND_NEAR_END, GameEventKind.CLOSE_QUARTERS}


@pytest.mark.parametrize(
    "prev, curr",
    [(frame(0), frame(2)), (frame(0), frame(1, round_index=1))],
)
def test_non_consecutive_frames(prev, curr):
    with pytest.raises(FrameSequenceError):
        detect_events(prev, curr, FAR, TABLE, THRESHOLDS, CONFIG)


def test_skill_display_names():
    assert skill_display_name("STAND_D_DF_FC") == "Special Skill"
    assert skill_display_name("STAND_D_DF_FB") == "Shoot Strong Projectile Forward"
    assert skill_display_name("STAND_B") == "Heavy Kick"
    assert skill_display_name("AIR_DB") == "Air Db"


def test_template_rejects_unknown_placeholder():
    with pytest.raises(ValueError):
        template(1, pattern="{WINNER} wins")


def test_template_rejects_bad_band():
    with pytest.raises(ValueError):
        template(1, band=(0.5, 0.5))
    with pytest.raises(ValueError):
        template(1, band=(0.2, 1.5))


@pytest.mark.parametrize(
    "tags",
    [("Neutral",), ("Neutral", "HitLanded"), ("RoundNearEnd", "CloseQuarters")],
)
def test_attacker_placeholders_need_an_attacking_tag(tags):
    with pytest.raises(ValueError):
        template(1, pattern="{ATTACKER} keeps pushing!", tags=tags)
    line = json.dumps({"id": 1, "pattern": "{SKILL} again!", "tags": list(tags)})
    with pytest.raises(ConfigurationError):
        load_templates([line])


def test_duplicate_ids_are_rejected():
    line = dump_template(template(3))
    with pytest.raises(ConfigurationError):
        load_templates([line, line])


def test_bundled_library():
    library = load_default_templates()
    assert len(library) >= 30
    assert any(GameEventKind.NEUTRAL in t.event_tags for t in library)
    assert len({t.id for t in library}) == len(library)


def test_single_template_library():
    only = template(1)
    rng = random.Random(0)
    for event in [NEUTRAL_EVENT, GameEvent(GameEventKind.BIG_HP_DROP, Side.P1, "Sweep")]:
        assert select_template([event], 0.9, [only], rng, previous_id=1) is only


def test_selection_is_deterministic():
    library = [template(1), template(2), template(3)]
    first = [TemplateSelector(library, seed=42).select([NEUTRAL_EVENT], 0.5).id for _ in range(5)]
    second = [TemplateSelector(library, seed=42).select([NEUTRAL_EVENT], 0.5).id for _ in range(5)]
    assert first == second


def test_no_immediate_repeat():
    library = [template(1), template(2)]
    rng = random.Random(3)
    for _ in range(20):
        assert select_template([NEUTRAL_EVENT], 0.5, library, rng, previous_id=1).id == 2

    selector = TemplateSelector(library, seed=8)
    picks = [selector.select([NEUTRAL_EVENT], 0.5).id for _ in range(10)]
    assert all(a != b for a, b in zip(picks, picks[1:]))


def test_band_then_tag_then_neutral_fallback():
    hit_low = template(1, tags=("HitLanded",), band=(0.0, 0.3))
    hit_high = template(2, tags=("HitLanded",), band=(0.7, 1.0))
    neutral = template(3)
    library = [hit_low, hit_high, neutral]
    rng = random.Random(0)
    hit = [GameEvent(GameEventKind.HIT_LANDED, Side.P1, "Sweep")]

    assert select_template(hit, 0.9, library, rng).id == 2
    assert select_template(hit, 1.0, library, rng).id == 2
    assert select_template(hit, 0.5, library, rng).id in {1, 2}
    assert select_template([GameEvent(GameEventKind.CLOSE_QUARTERS)], 0.5, library, rng).id == 3


def test_empty_library():
    with pytest.raises(ConfigurationError):
        select_template([NEUTRAL_EVENT], 0.5, [], random.Random(0))
    with pytest.raises(ConfigurationError):
        TemplateSelector([], seed=0)


def test_selection_skips_templates_that_cannot_render():
    needs_skill = template(1, pattern="{ATTACKER} lands a {SKILL}!", tags=("HitLanded",))
    plain_hit = template(2, pattern="{ATTACKER} connects!", tags=("HitLanded",))
    neutral = template(3, pattern="{P1} and {P2} circle.")
    library = [needs_skill, plain_hit, neutral]
    hit = [GameEvent(GameEventKind.HIT_LANDED, Side.P1, "")]

    assert not is_renderable(needs_skill, hit, NAMES)
    assert is_renderable(plain_hit, hit, NAMES)
    rng = random.Random(0)
    usable = lambda t: is_renderable(t, hit, NAMES)  # noqa: E731
    assert {select_template(hit, 0.5, library, rng, usable=usable).id for _ in range(20)} == {2}
    assert select_template(hit, 0.5, [needs_skill, neutral], rng, usable=usable) is neutral

    with pytest.raises(ConfigurationError):
        select_template(hit, 0.5, [needs_skill], rng, usable=usable)


def test_selection_always_succeeds():
    rng = random.Random(77)
    all_kinds = list(GameEventKind)
    for _ in range(300):
        library = [template(0)]
        for i in range(1, rng.randint(1, 8)):
            lo = rng.choice([0.0, 1 / 3, 2 / 3])
            library.append(
                template(i, tags=rng.sample([k.value for k in all_kinds], rng.randint(1, 3)), band=(lo, lo + 1 / 3))
            )
        events = [GameEvent(k, Side.P1, "Sweep") for k in rng.sample(all_kinds, rng.randint(1, 3))]
        chosen = select_template(events, rng.random(), library, rng, previous_id=rng.choice([None, 0, 1]))
        assert chosen in library


def test_render_high_scene():
    high = template(
        1,
        pattern="{ATTACKER} is so powerful releasing {SKILL} that {DEFENDER} should be very careful!",
        tags=("HitLanded",),
    )
    context = {"ATTACKER": "Garnet", "SKILL": "Heavy Kick", "DEFENDER": "Zen"}
    assert render(high, NAMES, context) == (
        "Garnet is so powerful releasing Heavy Kick that Zen should be very careful!"
    )


def test_render_without_placeholders():
    plain = template(2, pattern="They try to predict each other!")
    assert render(plain, NAMES, {}) == "They try to predict each other!"


def test_render_missing_placeholder():
    with pytest.raises(RenderError) as excinfo:
        render(template(3, pattern="{ATTACKER} strikes!", tags=("HitLanded",)), NAMES, {})
    assert excinfo.value.placeholder == "ATTACKER"


def test_event_context_names_the_attacker():
    events = [GameEvent(GameEventKind.ROUND_NEAR_END), GameEvent(GameEventKind.HIT_LANDED, Side.P2, "Sweep")]
    assert event_context(events, NAMES) == {
        "P1": "Garnet",
        "P2": "Zen",
        "ATTACKER": "Zen",
        "DEFENDER": "Garnet",
        "SKILL": "Sweep",
    }


def test_hit_line_credits_the_hitter_when_both_act():
    prev = frame(0, p2=player(x=800.0, action="CROUCH_FB", attack=True))
    curr = frame(
        1,
        p1=player(hp=185, action="STAND_B", attack=True),
        p2=player(x=800.0, action="CROUCH_FB", attack=True),
    )
    events = detect_events(prev, curr, FAR, TABLE, THRESHOLDS, CONFIG)
    assert events == [
        GameEvent(GameEventKind.ATTACK_STARTED, Side.P1, "Heavy Kick"),
        GameEvent(GameEventKind.HIT_LANDED, Side.P2, "Sweep"),
    ]

    hit_line = template(1, pattern="{ATTACKER} lands it on {DEFENDER}!", tags=("HitLanded",))
    attack_line = template(2, pattern="{ATTACKER} winds up a {SKILL}!", tags=("AttackStarted",))
    assert render(hit_line, NAMES, event_context(events, NAMES, hit_line)) == "Zen lands it on Garnet!"
    assert render(attack_line, NAMES, event_context(events, NAMES, attack_line)) == (
        "Garnet winds up a Heavy Kick!"
    )
    # Without a template the strongest event wins.
    assert event_context(events, NAMES)["ATTACKER"] == "Zen"


def test_bundled_templates_render_for_their_tags():
    attacker_event = {
        kind: GameEvent(kind, Side.P1, "Special Skill") for kind in GameEventKind
    }
    for t in load_default_templates():
        events = [
            attacker_event[k] if k not in (GameEventKind.NEUTRAL, GameEventKind.ROUND_NEAR_END,
                                           GameEventKind.CLOSE_QUARTERS) else GameEvent(k)
            for k in sorted(t.event_tags, key=lambda k: k.value)
        ]
        if all(e.attacker is None for e in events) and t.placeholders & {"ATTACKER", "DEFENDER", "SKILL"}:
            pytest.fail(f"template {t.id} needs an attacker but is tagged only with attacker-less events")
        text = render(t, NAMES, event_context(events, NAMES, t))
        assert "{" not in text and "}" not in text
