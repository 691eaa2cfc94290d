import numpy as np
import pytest

from typesim.env import (Action, AutocorrectDictionary, EnvConfig, EnvError,
                         IllegalActionError, LifecycleError, RewardParams,
                         TimeConstants, apply_autocorrect, reset, reset_with,
                         reward, step)
from typesim.keyboard import load_builtin_layout
from typesim.mechanisms import UserParams

LAYOUT = load_builtin_layout("qwerty_en")

QUIET = UserParams(f_k=1e-9, k_alpha=0.5, x0=0.0, y0=0.0, k_bounce=0,
                   k_swap=0, k_forget=0, p0_proof=0.0, p_obs_finger=0.0,
                   memory_decay=0.0, vision_acuity=1.0)


def config(level=1, phrase="hi", **kw):
    return EnvConfig(layout=LAYOUT, phrase=phrase, level=level, **kw)


def act(label, mt=0.3, hint=None, gaze=None):
    return Action(finger_goal=label, gaze_goal=gaze or label,
                  movement_time=mt, next_finger_hint=hint)


class TestConfig:
    def test_level_validation(self):
        with pytest.raises(EnvError):
            config(level=7)

    def test_phrase_must_be_typeable(self):
        with pytest.raises(EnvError, match="cannot be typed"):
            config(phrase="häi")

    def test_phrase_must_be_nonempty(self):
        with pytest.raises(EnvError):
            config(phrase="")

    def test_level2_needs_dictionary(self):
        with pytest.raises(EnvError, match="dictionary"):
            config(level=2)

    def test_time_constants_positive(self):
        with pytest.raises(EnvError):
            TimeConstants(key_dwell=0.0)


class TestReset:
    def test_fresh_state(self):
        state, obs = reset(config(), seed=3)
        assert state.buffer == ""
        assert state.clock == 0.0
        assert not state.done
        assert obs.elapsed_since_proofread == 0.0

    def test_deterministic(self):
        s1, o1 = reset(config(), seed=3)
        s2, o2 = reset(config(), seed=3)
        assert s1 == s2 and o1 == o2

    def test_finger_starts_on_space(self):
        state, _ = reset(config())
        assert LAYOUT.key_at(state.finger_pos).label == "space"


class TestStep:
    def test_quiet_typing(self):
        cfg = config()
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        for label in ("h", "i"):
            state, obs, events, done = step(state, act(label), QUIET, cfg, rng)
            assert not done
        assert state.buffer == "hi"
        state, _, events, done = step(state, Action(finger_goal="submit"),
                                      QUIET, cfg, rng)
        assert done and events[-1].kind == "submit"

    def test_clock_monotone_and_event_times(self):
        cfg = config(phrase="the cat")
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(1)
        last = 0.0
        for ch in "the cat":
            label = "space" if ch == " " else ch
            state, _, events, _ = step(state, act(label), QUIET, cfg, rng)
            for ev in events:
                assert ev.time >= last - 1e-12
                last = max(last, ev.time)
        assert state.clock >= last - 1e-9

    def test_step_after_done_raises(self):
        cfg = config()
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        state, _, _, _ = step(state, Action(finger_goal="submit"), QUIET, cfg, rng)
        with pytest.raises(LifecycleError):
            step(state, act("h"), QUIET, cfg, rng)

    def test_backspace_illegal_at_level0(self):
        cfg = config(level=0)
        state, _ = reset_with(cfg, QUIET)
        with pytest.raises(IllegalActionError):
            step(state, act("backspace"), QUIET, cfg,
                 np.random.default_rng(0))

    def test_backspace_edits_buffer(self):
        cfg = config()
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        state, _, _, _ = step(state, act("h"), QUIET, cfg, rng)
        state, _, events, _ = step(state, act("backspace"), QUIET, cfg, rng)
        assert state.buffer == ""
        assert any(ev.kind == "backspace" for ev in events)

    def test_lapse_drops_command(self):
        forgetful = UserParams.from_dict({**QUIET.to_dict(), "k_forget": 100.0})
        cfg = config()
        state, _ = reset_with(cfg, forgetful)
        state.clock = 10.0  # far from the last proofread
        state, _, events, _ = step(state, act("h"), forgetful, cfg,
                                   np.random.default_rng(0))
        assert state.buffer == ""
        assert any(ev.kind == "lapse" and ev.char == "h" for ev in events)

    def test_swap_reverses_pair(self):
        swappy = UserParams.from_dict({**QUIET.to_dict(), "k_swap": 1e6})
        cfg = config(phrase="hi")
        state, _ = reset_with(cfg, swappy)
        rng = np.random.default_rng(0)
        state, _, ev1, _ = step(state, act("h", hint="i"), swappy, cfg, rng)
        assert any(e.kind == "swap" for e in ev1)
        assert state.buffer == "ih"
        # the following command for "i" was already paid by the swap
        state, _, ev2, _ = step(state, act("i"), swappy, cfg, rng)
        assert state.buffer == "ih"
        assert not any(e.kind == "keypress" for e in ev2)

    def test_bounce_duplicates(self):
        bouncy = UserParams.from_dict({**QUIET.to_dict(), "k_bounce": 1e6})
        cfg = config(phrase="hi")
        state, _ = reset_with(cfg, bouncy)
        state, _, events, _ = step(state, act("h"), bouncy, cfg,
                                   np.random.default_rng(0))
        assert state.buffer == "hh"
        kinds = [e.kind for e in events]
        assert kinds.count("keypress") == 2 and "bounce" in kinds

    def test_proofread_event(self):
        cfg = config()
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        state, _, _, _ = step(state, act("h"), QUIET, cfg, rng)
        state, obs, events, _ = step(
            state, Action(gaze_goal="text-field"), QUIET, cfg, rng)
        pr = [e for e in events if e.kind == "proofread"]
        assert len(pr) == 1
        assert pr[0].missed is False  # p0_proof = 0
        assert obs.elapsed_since_proofread == 0.0

    def test_observation_error_probs_match_mechanisms(self):
        from typesim import mechanisms as m
        up = UserParams(k_bounce=0.1, k_swap=0.2, k_forget=0.05,
                        p0_proof=0.4, p_obs_finger=0.3)
        cfg = config()
        state, _ = reset_with(cfg, up)
        rng = np.random.default_rng(5)
        state, obs, _, _ = step(state, act("h"), up, cfg, rng)
        elapsed = state.clock - state.last_proofread_time
        t_read = min(1.5, cfg.time_constants.proofread_char_time
                     * len(state.buffer))
        expected = (m.p_miss_typo(up, t_read), m.p_miss_slip(up),
                    m.p_lapse(up, elapsed), m.p_bounce(up, state.last_speed),
                    m.p_swap(up, state.last_speed),
                    m.endpoint_spread(up, state.last_movement_time))
        assert obs.error_probs == pytest.approx(expected)

    def test_truncation_at_max_steps(self):
        cfg = config(max_steps=3)
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        done = False
        for _ in range(3):
            state, _, _, done = step(state, act("h"), QUIET, cfg, rng)
        assert done and state.truncated


class TestAutocorrect:
    WORDS = ["welcome", "to", "the", "show", "cat"]

    def test_fixes_close_word(self):
        buf, ev = apply_autocorrect("welcme ", self.WORDS)
        assert buf == "welcome "
        assert ev.before == "welcme" and ev.after == "welcome"

    def test_exact_word_unchanged(self):
        buf, ev = apply_autocorrect("welcome ", self.WORDS)
        assert buf == "welcome " and ev is None

    def test_distant_word_unchanged(self):
        buf, ev = apply_autocorrect("xqzvw ", self.WORDS)
        assert buf == "xqzvw " and ev is None

    def test_empty_word_noop(self):
        buf, ev = apply_autocorrect("welcome  ", self.WORDS)
        assert buf == "welcome  " and ev is None

    def test_only_last_word_touched(self):
        buf, ev = apply_autocorrect("xqzvw cst ", self.WORDS)
        assert buf == "xqzvw cat "
        assert ev.before == "cst"

    def test_no_trailing_space_noop(self):
        buf, ev = apply_autocorrect("welcme", self.WORDS)
        assert buf == "welcme" and ev is None

    def test_fires_in_level2_step(self):
        dic = AutocorrectDictionary(self.WORDS)
        cfg = EnvConfig(layout=LAYOUT, phrase="welcome to", level=2,
                        autocorrect_dictionary=dic)
        state, _ = reset_with(cfg, QUIET)
        rng = np.random.default_rng(0)
        state.buffer = "welcme"
        state, _, events, _ = step(state, act("space"), QUIET, cfg, rng)
        assert state.buffer == "welcome "
        assert any(e.kind == "autocorrect" for e in events)


class TestReward:
    def test_perfect_and_instant(self):
        assert reward(0.0, RewardParams(alpha=1.0, w=0.0), 0.0) == 1.0

    def test_total_failure(self):
        assert reward(1.0, RewardParams(alpha=1.0, w=0.0), 0.0) == 0.0

    def test_hand_value(self):
        assert reward(0.25, RewardParams(alpha=2.0, w=0.01), 10.0) \
            == pytest.approx(0.8375)

    def test_bounds_checked(self):
        with pytest.raises(EnvError):
            reward(1.5, RewardParams(), 0.0)
        with pytest.raises(EnvError):
            reward(0.5, RewardParams(), -1.0)
