"""Working-memory belief maintenance and the supervisory typing policy.

The supervisor never sees the true buffer.  It believes what it intended
to type unless it watched the finger and caught a slip, or a proofread
refreshed the belief from the screen.  Decisions (what to type next, when
to proofread, whether to correct now or later) derive entirely from that
belief, so mistakes propagate the way they do for people: an overlooked
typo is typed "past" and only resurfaces on a later look at the text.

The policy is a parametric rule set searched by the outer optimization
loop; its knobs are typing speed, proofreading triggers, and the
immediate-vs-delayed correction preference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import mechanisms
from .env import (BACKSPACE, SUBMIT, Action, EnvConfig, Observation,
                  RewardParams, character_error_rate, reset_with, reward,
                  step)
from .keyboard import TEXT_FIELD, char_for_label, label_for_char
from .mechanisms import UserParams
from .traces import Event, Trace


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class PolicyParams:
    """Strategy knobs for one simulated typist."""

    target_movement_time: float = 0.3   # seconds per keystroke
    proofread_confidence_threshold: float = 0.4
    proofread_interval: int = 8         # keystrokes between forced proofreads
    immediate_correction_bias: float = 0.8
    persistence: bool = True            # fix old errors vs abandon them

    def __post_init__(self):
        if not self.target_movement_time > 0:
            raise PolicyError("target_movement_time must be > 0")
        if not 0.0 <= self.proofread_confidence_threshold <= 1.0:
            raise PolicyError("proofread_confidence_threshold must be in [0, 1]")
        if self.proofread_interval < 1:
            raise PolicyError("proofread_interval must be >= 1")
        if not 0.0 <= self.immediate_correction_bias <= 1.0:
            raise PolicyError("immediate_correction_bias must be in [0, 1]")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyParams":
        vals = dict(d)
        if "proofread_interval" in vals:
            vals["proofread_interval"] = int(round(vals["proofread_interval"]))
        if "persistence" in vals:
            vals["persistence"] = bool(vals["persistence"])
        return cls(**vals)


@dataclass
class WorkingMemory:
    believed_text: str = ""
    char_confidence: list[float] = field(default_factory=list)
    last_proofread_at: float = 0.0
    flagged_error_position: int | None = None
    # policy-side bookkeeping
    phrase_pos: int = 0                   # next phrase index to issue
    deferred: set[int] = field(default_factory=set)
    keystrokes_since_proofread: int = 0
    gaze_target: str = "space"
    clock: float = 0.0

    def min_confidence(self) -> float:
        return min(self.char_confidence, default=1.0)

    def _append(self, ch: str) -> None:
        self.believed_text += ch
        self.char_confidence.append(1.0)

    def _pop(self) -> None:
        if self.believed_text:
            self.believed_text = self.believed_text[:-1]
            self.char_confidence.pop()


def update_belief(wm: WorkingMemory, action: Action, events: list[Event],
                  buffer: str, up: UserParams, clock: float,
                  rng: np.random.Generator) -> WorkingMemory:
    """Fold one executed step into the belief.

    Confidence decays exponentially with elapsed time.  Keypresses are
    observed only while the gaze guides the finger, and even then a slip
    goes unnoticed with probability p_miss_slip, in which case the
    intended character is believed typed.  A proofread that does not miss
    replaces the belief with the true text; one that misses refreshes
    confidence while leaving the erroneous belief intact.
    """
    dt = clock - wm.clock
    wm.clock = clock
    if dt > 0 and up.memory_decay > 0 and wm.char_confidence:
        decay = math.exp(-up.memory_decay * dt)
        wm.char_confidence = [c * decay for c in wm.char_confidence]

    for ev in events:
        if ev.kind == "fixation":
            wm.gaze_target = ev.target

    goal = action.finger_goal
    if goal is not None and goal != SUBMIT:
        wm.keystrokes_since_proofread += 1
        committed = [ev for ev in events
                     if ev.kind in ("keypress", "backspace")]
        lapsed = any(ev.kind == "lapse" for ev in events)
        touched = any(ev.kind == "touch" for ev in events)
        intended_char = None if goal == BACKSPACE else label_char(goal)
        if lapsed or not touched:
            # nothing happened on screen (lapse, or a swap already paid
            # this command): the supervisor believes the intent succeeded
            _apply_intent(wm, goal, intended_char)
        else:
            guided = wm.gaze_target != TEXT_FIELD
            noticed = guided and rng.random() >= mechanisms.p_miss_slip(up)
            if noticed:
                if not committed:
                    # watched the finger tap a gap: retype this character
                    if goal != BACKSPACE:
                        wm.phrase_pos = max(0, wm.phrase_pos - 1)
                else:
                    for ev in committed:
                        if ev.kind == "keypress":
                            wm._append(ev.char)
                        else:
                            wm._pop()
            else:
                _apply_intent(wm, goal, intended_char)

    for ev in events:
        if ev.kind == "proofread":
            wm.last_proofread_at = ev.time
            wm.keystrokes_since_proofread = 0
            if not ev.missed:
                wm.believed_text = buffer
                wm.deferred.clear()
                wm.flagged_error_position = None
            wm.char_confidence = [1.0] * len(wm.believed_text)
    return wm


def _apply_intent(wm: WorkingMemory, goal: str, intended_char: str | None):
    if goal == BACKSPACE:
        wm._pop()
    elif intended_char is not None:
        wm._append(intended_char)


def label_char(label: str) -> str | None:
    return char_for_label(label)


def first_mismatch(believed: str, phrase: str) -> int | None:
    """Leftmost index where the belief contradicts the phrase.

    A belief that is a proper prefix of the phrase is not (yet) a
    mismatch; extra trailing characters mismatch at the phrase length.
    """
    limit = min(len(believed), len(phrase))
    for i in range(limit):
        if believed[i] != phrase[i]:
            return i
    if len(believed) > len(phrase):
        return len(phrase)
    return None


def decide(wm: WorkingMemory, obs: Observation, pp: PolicyParams,
           config: EnvConfig, rng: np.random.Generator) -> Action:
    """Choose the next finger and gaze goals from the current belief.

    Priority: continue an ongoing correction; start one for a just-typed
    slip (immediate_correction_bias decides now-or-later); start a delayed
    correction for an older known error when the policy is persistent;
    proofread when confidence ran low, the keystroke interval expired, or
    the phrase is finished; otherwise type the next phrase character with
    the gaze guiding the finger.
    """
    phrase = config.phrase
    level = config.level
    mt = pp.target_movement_time
    believed = wm.believed_text

    def correction() -> Action:
        return Action(finger_goal=BACKSPACE, gaze_goal=BACKSPACE,
                      movement_time=mt)

    if wm.flagged_error_position is not None and level >= 1:
        if len(believed) > wm.flagged_error_position:
            return correction()
        wm.flagged_error_position = None
        wm.phrase_pos = len(believed)

    mis = first_mismatch(believed, phrase)
    if mis is not None and level >= 1 and mis not in wm.deferred:
        if mis >= len(believed) - 2:
            # a just-noticed slip (the window covers bounce and swap pairs)
            if rng.random() < pp.immediate_correction_bias:
                wm.flagged_error_position = mis
                wm.deferred.discard(mis)
                return correction()
            wm.deferred.add(mis)
        elif pp.persistence:
            wm.flagged_error_position = mis
            return correction()
        else:
            wm.deferred.add(mis)

    if wm.phrase_pos >= len(phrase):
        if level >= 1 and wm.keystrokes_since_proofread > 0:
            # look at the finished text once before acting on it
            return Action(gaze_goal=TEXT_FIELD)
        end_mis = mis
        if end_mis is None and len(believed) < len(phrase):
            end_mis = len(believed)  # believed text stops short
        if end_mis is not None and level >= 1 and pp.persistence:
            wm.deferred.discard(end_mis)
            wm.flagged_error_position = end_mis
            if len(believed) > end_mis:
                return correction()
            wm.flagged_error_position = None
            wm.phrase_pos = end_mis
        else:
            return Action(finger_goal=SUBMIT)

    if (wm.min_confidence() < pp.proofread_confidence_threshold
            or wm.keystrokes_since_proofread >= pp.proofread_interval):
        return Action(gaze_goal=TEXT_FIELD)

    ch = phrase[wm.phrase_pos]
    nxt = (phrase[wm.phrase_pos + 1]
           if wm.phrase_pos + 1 < len(phrase) else None)
    wm.phrase_pos += 1
    label = label_for_char(ch)
    return Action(finger_goal=label, gaze_goal=label, movement_time=mt,
                  next_finger_hint=None if nxt is None else label_for_char(nxt))


def run_episode(config: EnvConfig, up: UserParams, pp: PolicyParams,
                rp: RewardParams, seed: int) -> Trace:
    """Roll one full episode and return its immutable trace."""
    if pp.target_movement_time <= up.x0:
        raise PolicyError(
            f"target_movement_time {pp.target_movement_time} must exceed "
            f"the motor offset x0 {up.x0}")
    rng = np.random.default_rng(seed)
    state, obs = reset_with(config, up)
    wm = WorkingMemory(gaze_target=state.gaze_target)
    all_events: list[Event] = []
    done = False
    while not done:
        obs.believed_text = wm.believed_text
        obs.char_confidence = list(wm.char_confidence)
        action = decide(wm, obs, pp, config, rng)
        state, obs, events, done = step(state, action, up, config, rng)
        update_belief(wm, action, events, state.buffer, up, state.clock, rng)
        all_events.extend(events)
    total_time = all_events[-1].time if all_events else 0.0
    cer = character_error_rate(config.phrase, state.buffer)
    r = reward(cer, rp, total_time)
    return Trace(
        phrase=config.phrase,
        level=config.level,
        layout_name=config.layout.name,
        seed=seed,
        user_params=up.to_dict(),
        policy_params=pp.to_dict(),
        reward_params=rp.to_dict(),
        events=all_events,
        final_text=state.buffer,
        total_time=total_time,
        reward=r,
        truncated=state.truncated,
        time_constants=config.time_constants.to_dict(),
        max_steps=config.max_steps,
    )
