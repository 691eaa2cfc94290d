"""The typing environment: state, observation, action, stochastic transition.

A step executes the supervisor's finger and gaze goals in parallel and
injects errors in a fixed order: a memory lapse can drop the motor command
entirely; an order swap can execute the following intended key first; the
touch itself lands with motor noise and may hit a neighboring key or no
key at all; and a bounce can commit an immediate duplicate.  Gaze goals
move fixation between keys (guidance) and the text field (proofreading,
which can miss typos).

Correction levels: 0 forbids backspace goals, 1 allows manual correction,
2 additionally autocorrects the just-terminated word on each space press.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from . import kernels, mechanisms
from .keyboard import (TEXT_FIELD, KeyboardLayout, Point, char_for_label,
                       label_for_char)
from .mechanisms import UserParams
from .traces import Event

BACKSPACE = "backspace"
SUBMIT = "submit"

# Reading time per believed character is capped so very long texts do not
# make proofreading arbitrarily slow (and arbitrarily reliable).
PROOFREAD_T_CAP = 1.5

DEFAULT_MOVEMENT_TIME = 0.35


class EnvError(ValueError):
    pass


class IllegalActionError(EnvError):
    pass


class LifecycleError(EnvError):
    pass


@dataclass(frozen=True)
class TimeConstants:
    saccade_duration: float = 0.03
    fixation_duration: float = 0.20
    key_dwell: float = 0.10
    proofread_char_time: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise EnvError(f"time constant {f.name} must be > 0")

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class RewardParams:
    alpha: float = 1.0  # error-sensitivity exponent
    w: float = 0.01     # time weight

    def __post_init__(self):
        if not self.alpha > 0:
            raise EnvError("alpha must be > 0")
        if self.w < 0:
            raise EnvError("w must be >= 0")

    def to_dict(self):
        return {"alpha": self.alpha, "w": self.w}

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: float(v) for k, v in d.items()})


class AutocorrectDictionary:
    """A word list packed for fast nearest-word scans."""

    def __init__(self, words: list[str]):
        self.words = list(words)
        self.word_set = set(self.words)
        self.codes, self.lens = kernels.encode_words(self.words)

    def __len__(self):
        return len(self.words)


@dataclass
class EnvConfig:
    layout: KeyboardLayout
    phrase: str
    level: int = 1
    time_constants: TimeConstants = field(default_factory=TimeConstants)
    autocorrect_dictionary: AutocorrectDictionary | None = None
    max_steps: int = 0  # 0 = auto from phrase length

    def __post_init__(self):
        if self.level not in (0, 1, 2):
            raise EnvError(f"level must be 0, 1, or 2 (got {self.level})")
        if not self.phrase:
            raise EnvError("phrase must be non-empty")
        for ch in self.phrase:
            if not self.layout.has_label(label_for_char(ch)):
                raise EnvError(
                    f"phrase character {ch!r} cannot be typed on layout "
                    f"{self.layout.name!r}")
        if self.level == 2 and self.autocorrect_dictionary is None:
            raise EnvError("level 2 requires an autocorrect dictionary")
        if self.max_steps <= 0:
            self.max_steps = 8 * len(self.phrase) + 64


@dataclass
class FullState:
    buffer: str = ""
    cursor: int = 0
    finger_pos: Point = field(default_factory=lambda: Point(0.5, 0.9))
    gaze_target: str = "space"
    clock: float = 0.0
    motor_queue: list[str] = field(default_factory=list)  # swap-prepaid keys
    done: bool = False
    # bookkeeping for observations and the lapse clock
    last_proofread_time: float = 0.0
    last_movement_time: float = 0.0
    last_speed: float = 0.0
    steps: int = 0
    truncated: bool = False


@dataclass
class Observation:
    believed_text: str
    char_confidence: list[float]
    believed_finger: Point
    elapsed_since_proofread: float
    error_probs: tuple[float, float, float, float, float, float]
    # order: miss-typo, miss-slip, lapse, bounce, swap, motor-noise SD


@dataclass(frozen=True)
class Action:
    finger_goal: str | None = None   # key label, "backspace", or "submit"
    gaze_goal: str | None = None     # key label or "text-field"
    movement_time: float | None = None  # the policy's speed knob
    next_finger_hint: str | None = None  # following intended key, for swaps

    def __post_init__(self):
        if self.finger_goal is None and self.gaze_goal is None:
            raise IllegalActionError("action must set at least one goal")


def _observe(state: FullState, config: EnvConfig, up: UserParams) -> Observation:
    t_now = min(PROOFREAD_T_CAP,
                config.time_constants.proofread_char_time * len(state.buffer))
    elapsed = max(0.0, state.clock - state.last_proofread_time)
    if state.last_movement_time > up.x0:
        motor_sd = mechanisms.endpoint_spread(up, state.last_movement_time)
    else:
        motor_sd = 0.0
    return Observation(
        believed_text="",
        char_confidence=[],
        believed_finger=state.finger_pos,
        elapsed_since_proofread=elapsed,
        error_probs=(
            mechanisms.p_miss_typo(up, t_now),
            mechanisms.p_miss_slip(up),
            mechanisms.p_lapse(up, elapsed),
            mechanisms.p_bounce(up, state.last_speed),
            mechanisms.p_swap(up, state.last_speed),
            motor_sd,
        ),
    )


def reset(config: EnvConfig, seed: int | None = None) -> tuple[FullState, Observation]:
    """Fresh episode state: empty buffer, finger on the space bar."""
    del seed  # the caller owns the random stream; reset is deterministic
    state = FullState(finger_pos=config.layout.center_of("space"),
                      gaze_target="space")
    return state, _observe(state, config, UserParams())


def reset_with(config: EnvConfig, up: UserParams) -> tuple[FullState, Observation]:
    state = FullState(finger_pos=config.layout.center_of("space"),
                      gaze_target="space")
    return state, _observe(state, config, up)


def apply_autocorrect(buffer: str, dictionary) -> tuple[str, Event | None]:
    """Autocorrect the word terminated by the trailing space, if any.

    The word is replaced by the earliest dictionary word at minimal
    Damerau-Levenshtein distance when that distance is 1 or 2.  Words
    already in the dictionary, empty words, and words farther than 2 from
    everything stay unchanged.  The returned event carries no time; the
    caller stamps it.
    """
    if not isinstance(dictionary, AutocorrectDictionary):
        dictionary = AutocorrectDictionary(list(dictionary))
    if not buffer.endswith(" "):
        return buffer, None
    body = buffer[:-1]
    cut = body.rfind(" ") + 1
    word = body[cut:]
    if not word or word in dictionary.word_set:
        return buffer, None
    idx, dist = kernels.dl_scan(word, dictionary.codes, dictionary.lens, cap=2)
    if idx < 0 or not 1 <= dist <= 2:
        return buffer, None
    replacement = dictionary.words[idx]
    new_buffer = body[:cut] + replacement + " "
    event = Event(time=0.0, kind="autocorrect", before=word, after=replacement)
    return new_buffer, event


def reward(err: float, rp: RewardParams, t: float) -> float:
    """Terminal reward balancing accuracy against time spent."""
    if not 0.0 <= err <= 1.0:
        raise EnvError(f"error rate {err} outside [0, 1]")
    if t < 0:
        raise EnvError("time must be >= 0")
    return (1.0 - err ** rp.alpha) - rp.w * t


def _execute_keystroke(state: FullState, label: str, movement_time: float,
                       up: UserParams, config: EnvConfig, rng,
                       t_start: float, events: list[Event]) -> float:
    """Move the finger to a key and commit whatever the touch lands on.

    Returns the elapsed finger time.  Appends touch/keypress/backspace/
    bounce/autocorrect events with correct in-step timestamps.
    """
    tc = config.time_constants
    target = config.layout.center_of(label)
    dist = state.finger_pos.dist(target)
    speed = dist / movement_time
    touch = mechanisms.sample_touch(up, target, movement_time, rng)
    elapsed = movement_time
    t_touch = t_start + elapsed
    events.append(Event(time=t_touch, kind="touch",
                        position=(touch.x, touch.y)))
    state.finger_pos = touch
    state.last_movement_time = movement_time
    state.last_speed = speed
    elapsed += tc.key_dwell
    hit = config.layout.key_at(touch)
    if hit is None:
        return elapsed  # omission pathway: tapped a gap or off-keyboard
    committed = _commit_key(state, hit.label, touch, config, t_touch, events)
    if committed is not None and rng.random() < mechanisms.p_bounce(up, speed):
        t_dup = t_start + elapsed
        events.append(Event(time=t_dup, kind="bounce",
                            position=(touch.x, touch.y)))
        _commit_key(state, hit.label, touch, config, t_dup, events)
        elapsed += tc.key_dwell
    return elapsed


def _commit_key(state: FullState, label: str, touch: Point, config: EnvConfig,
                t: float, events: list[Event]) -> str | None:
    """Apply one committed key: character append, backspace, or dead key."""
    if label == BACKSPACE:
        if config.level == 0:
            return None  # the key itself is disabled at level 0
        events.append(Event(time=t, kind="backspace",
                            position=(touch.x, touch.y)))
        if state.buffer:
            state.buffer = state.buffer[:-1]
        state.cursor = len(state.buffer)
        return None  # backspaces do not bounce
    ch = char_for_label(label)
    if ch is None:
        return None  # enter commits nothing here
    state.buffer += ch
    state.cursor = len(state.buffer)
    events.append(Event(time=t, kind="keypress", char=ch,
                        position=(touch.x, touch.y)))
    if ch == " " and config.level == 2:
        new_buffer, ac = apply_autocorrect(state.buffer,
                                           config.autocorrect_dictionary)
        if ac is not None:
            state.buffer = new_buffer
            state.cursor = len(state.buffer)
            events.append(Event(time=t, kind="autocorrect",
                                before=ac.before, after=ac.after))
    return ch


def step(state: FullState, action: Action, up: UserParams, config: EnvConfig,
         rng) -> tuple[FullState, Observation, list[Event], bool]:
    """Advance one supervisory decision; returns (state, obs, events, done).

    Finger and gaze goals run in parallel: the step consumes the longer of
    the two movement durations.
    """
    if state.done:
        raise LifecycleError("step() called on a finished episode")
    if action.finger_goal == BACKSPACE and config.level == 0:
        raise IllegalActionError("backspace goal is illegal at level 0")
    tc = config.time_constants
    t0 = state.clock
    events: list[Event] = []
    finger_time = 0.0
    gaze_time = 0.0

    goal = action.finger_goal
    movement_time = action.movement_time or DEFAULT_MOVEMENT_TIME
    if goal is not None and goal != SUBMIT and movement_time <= up.x0:
        raise mechanisms.InfeasibleSpeedError(
            f"movement_time {movement_time} <= x0 {up.x0}")

    if goal == SUBMIT:
        state.motor_queue.clear()
        events.append(Event(time=t0, kind="submit"))
        state.done = True
    elif goal == BACKSPACE:
        state.motor_queue.clear()
        finger_time = _execute_keystroke(state, BACKSPACE, movement_time, up,
                                         config, rng, t0, events)
    elif goal is not None:
        if state.motor_queue and state.motor_queue[0] == goal:
            # this command was already executed by an earlier swap
            state.motor_queue.pop(0)
        else:
            state.motor_queue.clear()
            elapsed = max(0.0, t0 - state.last_proofread_time)
            if rng.random() < mechanisms.p_lapse(up, elapsed):
                events.append(Event(time=t0, kind="lapse", char=char_for_label(goal)))
                finger_time = tc.key_dwell  # decision overhead only
            else:
                hint = action.next_finger_hint
                swap_ok = (hint is not None and hint != goal
                           and hint not in (BACKSPACE, SUBMIT)
                           and char_for_label(hint) is not None
                           and char_for_label(goal) is not None)
                dist = state.finger_pos.dist(config.layout.center_of(goal))
                speed = dist / movement_time
                if swap_ok and rng.random() < mechanisms.p_swap(up, speed):
                    events.append(Event(time=t0, kind="swap", first=goal,
                                        second=hint))
                    finger_time += _execute_keystroke(
                        state, hint, movement_time, up, config, rng,
                        t0 + finger_time, events)
                    finger_time += _execute_keystroke(
                        state, goal, movement_time, up, config, rng,
                        t0 + finger_time, events)
                    state.motor_queue = [hint]
                else:
                    finger_time = _execute_keystroke(
                        state, goal, movement_time, up, config, rng, t0, events)

    if action.gaze_goal is not None and not state.done:
        gaze_time = _execute_gaze(state, action.gaze_goal, up, config, rng,
                                  t0, events)

    duration = max(finger_time, gaze_time)
    if duration == 0.0 and not state.done:
        duration = tc.key_dwell  # pure decision step
    state.clock = t0 + duration
    state.steps += 1
    if not state.done and state.steps >= config.max_steps:
        state.done = True
        state.truncated = True
    events.sort(key=lambda e: e.time)
    return state, _observe(state, config, up), events, state.done


def _execute_gaze(state: FullState, gaze_goal: str, up: UserParams,
                  config: EnvConfig, rng, t0: float,
                  events: list[Event]) -> float:
    """Move fixation; proofread when the gaze lands on the text field."""
    tc = config.time_constants
    moved = gaze_goal != state.gaze_target
    gaze_time = 0.0
    if moved:
        gaze_time = tc.saccade_duration
        events.append(Event(time=t0 + gaze_time, kind="fixation",
                            target=gaze_goal))
        state.gaze_target = gaze_goal
    if gaze_goal == TEXT_FIELD:
        t_read = min(PROOFREAD_T_CAP,
                     tc.proofread_char_time * len(state.buffer))
        gaze_time += max(tc.fixation_duration, t_read)
        missed = rng.random() < mechanisms.p_miss_typo(up, t_read)
        events.append(Event(time=t0 + gaze_time, kind="proofread",
                            duration=t_read, missed=missed))
        state.last_proofread_time = t0 + gaze_time
    elif moved:
        gaze_time += tc.fixation_duration
    return gaze_time


def character_error_rate(phrase: str, final_text: str) -> float:
    """Edit distance over phrase length, clamped into [0, 1]."""
    from .metrics import align
    if not phrase:
        return 0.0
    return min(1.0, align(phrase, final_text).distance / len(phrase))
