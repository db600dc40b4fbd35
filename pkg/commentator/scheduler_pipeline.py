"""
Real-time commentary loop.

Each commentary is produced in four steps:
  1. read the frame; continue only if nothing is being spoken
  2. compute pitch/volume from the highlight and generate the text
  3. hand both to text-to-speech
  4. account for playback before the gate opens again

Offline scripting models playback with estimate_duration(); live mode waits for
the dispatcher's playback-finished signal. Both drive the same state machine.
"""

import logging
import threading
import time
from dataclasses import dataclass, field, replace
from typing import (
    BinaryIO,
    Callable,
    Iterable,
    List,
    Optional,
    Protocol,
    TextIO,
    Tuple,
    Union,
)

from pydantic import BaseModel, ConfigDict, Field

from commentator.commentary_text import (
    NEUTRAL_EVENT,
    EventThresholds,
    GameEvent,
    PlayerNames,
    Template,
    TemplateSelector,
    detect_events,
    event_context,
    is_neutral,
    is_renderable,
    load_default_templates,
    render,
)
from commentator.game_model import (
    FrameSnapshot,
    LogEvent,
    RoundConfig,
    RoundStart,
    iter_log_events,
)
from commentator.highlight_engine import (
    CueWeights,
    HighlightCues,
    RankActTable,
    RoundTracker,
    evaluate_frame,
    observe_distance,
)
from commentator.phonetic_adjuster import (
    PITCH_RANGE,
    VOLUME_CLAMP_RANGE,
    VOLUME_MAP_RANGE,
    DesignId,
    PhoneticParams,
    PhoneticRange,
    adjust,
)

logger = logging.getLogger(__name__)

WORDS_PER_SECOND = 2.5
SPEECH_PADDING_S = 0.3
MIN_SPEECH_S = 1.0


@dataclass(frozen=True)
class Idle:
    since: float = 0.0


@dataclass(frozen=True)
class Speaking:
    since: float
    until: float


UtteranceState = Union[Idle, Speaking]


class CommentaryDirective(BaseModel):
    """One scheduled utterance handed to text-to-speech."""

    model_config = ConfigDict(frozen=True)

    frame_index: int = Field(ge=0)
    round_index: int = Field(ge=0)
    round_time_s: float = Field(ge=0.0)
    text: str = Field(min_length=1)
    phonetics: PhoneticParams
    highlight: float = Field(ge=0.0, le=1.0)
    design: DesignId


@dataclass(frozen=True)
class EngineConfig:
    """Everything one commentary run needs besides the frames."""

    round: RoundConfig = field(default_factory=RoundConfig)
    rank_table: RankActTable = field(default_factory=RankActTable.default)
    weights: CueWeights = field(default_factory=CueWeights.equal)
    design: DesignId = DesignId.D1
    pitch_range: PhoneticRange = PITCH_RANGE
    volume_map_range: PhoneticRange = VOLUME_MAP_RANGE
    volume_clamp_range: PhoneticRange = VOLUME_CLAMP_RANGE
    thresholds: EventThresholds = field(default_factory=EventThresholds)
    names: PlayerNames = field(default_factory=PlayerNames)
    templates: Tuple[Template, ...] = field(
        default_factory=lambda: tuple(load_default_templates())
    )
    neutral_cadence_s: float = 6.0
    seed: int = 0


@dataclass(frozen=True)
class SchedulerState:
    utterance: UtteranceState = field(default_factory=Idle)
    tracker: RoundTracker = field(default_factory=RoundTracker)


class PlaybackSignal:
    """
    Busy flag plus a single-consumer "playback finished" notification.
    Set from the dispatch thread, consumed by the tick loop.
    """

    def __init__(self):
        self._finished = threading.Event()
        self._busy = threading.Event()

    @property
    def busy(self) -> bool:
        return self._busy.is_set()

    def begin(self) -> None:
        self._finished.clear()
        self._busy.set()

    def finish(self) -> None:
        self._busy.clear()
        self._finished.set()

    def consume_finished(self) -> bool:
        if self._finished.is_set():
            self._finished.clear()
            return True
        return False


class Dispatcher(Protocol):
    signal: PlaybackSignal

    def submit(self, directive: CommentaryDirective) -> None: ...


def estimate_duration(text: str) -> float:
    """Modelled speaking time: 2.5 words per second plus 0.3 s, at least 1 s."""
    words = len(text.split())
    return max(MIN_SPEECH_S, words / WORDS_PER_SECOND + SPEECH_PADDING_S)


def _release_gate(
    utterance: UtteranceState, now: float, playback: Optional[PlaybackSignal]
) -> UtteranceState:
    if isinstance(utterance, Idle):
        return utterance
    if playback is not None:
        return Idle(since=now) if playback.consume_finished() else utterance
    return Idle(since=now) if now >= utterance.until else utterance


def _frame_events(
    prev: Optional[FrameSnapshot],
    curr: FrameSnapshot,
    cues: HighlightCues,
    engine: EngineConfig,
) -> List[GameEvent]:
    if (
        prev is None
        or prev.round_index != curr.round_index
        or curr.frame_index != prev.frame_index + 1
    ):
        return [NEUTRAL_EVENT]
    return detect_events(
        prev, curr, cues, engine.rank_table, engine.thresholds, engine.round
    )


def _compose(
    curr: FrameSnapshot,
    cues: HighlightCues,
    events: List[GameEvent],
    engine: EngineConfig,
    selector: TemplateSelector,
) -> CommentaryDirective:
    template = selector.select(
        events,
        cues.highlight,
        usable=lambda t: is_renderable(t, events, engine.names),
    )
    text = render(template, engine.names, event_context(events, engine.names, template))

    phonetics = adjust(
        cues.highlight,
        engine.design,
        engine.pitch_range,
        engine.volume_map_range,
        vol_clamp=engine.volume_clamp_range,
    )
    return CommentaryDirective(
        frame_index=curr.frame_index,
        round_index=curr.round_index,
        round_time_s=curr.round_time_s,
        text=text,
        phonetics=phonetics,
        highlight=cues.highlight,
        design=engine.design,
    )


def tick(
    curr: FrameSnapshot,
    prev: Optional[FrameSnapshot],
    state: SchedulerState,
    engine: EngineConfig,
    selector: TemplateSelector,
    playback: Optional[PlaybackSignal] = None,
) -> Tuple[Optional[CommentaryDirective], SchedulerState]:
    """
    Advance the commentary state machine by one frame.

    Emits a directive only while idle, and only for a non-neutral event or when
    the gate has been open for neutral_cadence_s without one.
    """
    now = curr.round_time_s
    utterance = _release_gate(state.utterance, now, playback)

    if isinstance(utterance, Speaking):
        tracker = observe_distance(state.tracker, curr.p1.x_pos, curr.p2.x_pos)
        return None, SchedulerState(utterance=utterance, tracker=tracker)

    cues, tracker = evaluate_frame(
        curr, engine.round, engine.rank_table, engine.weights, state.tracker
    )
    state = SchedulerState(utterance=utterance, tracker=tracker)

    events = _frame_events(prev, curr, cues, engine)
    if is_neutral(events) and now - utterance.since < engine.neutral_cadence_s:
        return None, state

    directive = _compose(curr, cues, events, engine, selector)
    until = now + estimate_duration(directive.text)
    logger.debug(
        "frame %d: %r (h=%.4f, until %.2fs)",
        curr.frame_index,
        directive.text,
        directive.highlight,
        until,
    )
    return directive, replace(state, utterance=Speaking(since=now, until=until))


def start_round(state: SchedulerState, last_round_time: Optional[float]) -> SchedulerState:
    """
    Reset per-round state. An utterance still being spoken finishes, so its
    remaining time carries over onto the new round's clock.
    """
    utterance = state.utterance
    if isinstance(utterance, Speaking) and last_round_time is not None:
        remaining = utterance.until - last_round_time
        if remaining > 0:
            return SchedulerState(utterance=Speaking(since=0.0, until=remaining))
    return SchedulerState()


class CommentaryScheduler:
    """Owns the tick loop state for one run."""

    def __init__(self, engine: EngineConfig, playback: Optional[PlaybackSignal] = None):
        self.engine = engine
        self.playback = playback
        self.selector = TemplateSelector(engine.templates, seed=engine.seed)
        self.state = SchedulerState()
        self._prev: Optional[FrameSnapshot] = None

    def start_round(self, marker: RoundStart) -> None:
        last_time = self._prev.round_time_s if self._prev is not None else None
        if self.playback is not None and isinstance(self.state.utterance, Speaking):
            # Live playback ends on the dispatcher's signal, not the clock.
            self.state = SchedulerState(utterance=self.state.utterance)
        else:
            self.state = start_round(self.state, last_time)
        self._prev = None
        logger.debug("Round %d starts at frame %d", marker.round_index, marker.frame_index)

    def tick(self, frame: FrameSnapshot) -> Optional[CommentaryDirective]:
        directive, self.state = tick(
            frame, self._prev, self.state, self.engine, self.selector, self.playback
        )
        self._prev = frame
        return directive


def run_events(events: Iterable[LogEvent], engine: EngineConfig) -> List[CommentaryDirective]:
    """Offline scripting over already-parsed log events."""
    scheduler = CommentaryScheduler(engine)
    script = []
    for event in events:
        if isinstance(event, RoundStart):
            scheduler.start_round(event)
            continue
        directive = scheduler.tick(event)
        if directive is not None:
            script.append(directive)
    return script


def run_pipeline(
    log: Union[BinaryIO, Iterable[Union[bytes, str]]], engine: EngineConfig
) -> List[CommentaryDirective]:
    """
    Produce the commentary script for a frame log.

    Returns:
        Directives ordered by frame index; deterministic for fixed log, seed,
        design and configuration.
    """
    script = run_events(iter_log_events(log, engine.round), engine)
    logger.info("Generated %d directives (design %d)", len(script), engine.design)
    return script


def run_live(
    events: Iterable[LogEvent],
    engine: EngineConfig,
    dispatcher: Dispatcher,
    *,
    pace: bool = True,
    sleep: Callable[[float], None] = time.sleep,
) -> List[CommentaryDirective]:
    """
    Live mode: frames are fed at the nominal frame rate and the utterance gate
    follows the dispatcher's playback signal.
    """
    scheduler = CommentaryScheduler(engine, playback=dispatcher.signal)
    interval = 1.0 / engine.round.fps
    script = []
    for event in events:
        if isinstance(event, RoundStart):
            scheduler.start_round(event)
            continue
        directive = scheduler.tick(event)
        if directive is not None:
            dispatcher.submit(directive)
            script.append(directive)
        if pace:
            sleep(interval)
    return script


def write_script(script: Iterable[CommentaryDirective], fp: TextIO) -> None:
    for directive in script:
        fp.write(directive.model_dump_json())
        fp.write("\n")


def read_script(lines: Iterable[str]) -> List[CommentaryDirective]:
    return [CommentaryDirective.model_validate_json(line) for line in lines if line.strip()]
