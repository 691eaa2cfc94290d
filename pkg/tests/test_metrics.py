import math
import random

import pytest

from typesim.metrics import (BACKSPACE, EditOpCounts, MetricsReport, Tap,
                             aggregate, align, classify_keystrokes,
                             report_from_log, reports_to_csv)

from oracles import oracle_align


class TestAlign:
    def test_insertion_example(self):
        c = align("typist", "typoist")
        assert (c.insertions, c.omissions, c.substitutions,
                c.transpositions) == (1, 0, 0, 0)

    def test_omission_example(self):
        c = align("typist", "tpist")
        assert (c.insertions, c.omissions, c.substitutions,
                c.transpositions) == (0, 1, 0, 0)

    def test_substitution_example(self):
        c = align("typist", "typust")
        assert (c.insertions, c.omissions, c.substitutions,
                c.transpositions) == (0, 0, 1, 0)

    def test_transposition_example(self):
        c = align("should", "shoudl")
        assert (c.insertions, c.omissions, c.substitutions,
                c.transpositions) == (0, 0, 0, 1)

    def test_identity(self):
        for s in ("", "a", "same text here"):
            assert align(s, s) == EditOpCounts()

    def test_empty_sides(self):
        assert align("", "abc").insertions == 3
        assert align("abc", "").omissions == 3

    def test_substitutions_preferred_over_ins_omi_pairs(self):
        c = align("ab", "bc")
        assert c.substitutions == 2 and c.insertions == 0 and c.omissions == 0

    def test_symmetric_distance(self):
        random.seed(5)
        for _ in range(200):
            s = "".join(random.choice("abc") for _ in range(random.randint(0, 6)))
            t = "".join(random.choice("abc") for _ in range(random.randint(0, 6)))
            assert align(s, t).distance == align(t, s).distance

    def test_zero_distance_iff_equal(self):
        random.seed(6)
        for _ in range(200):
            s = "".join(random.choice("ab") for _ in range(random.randint(0, 5)))
            t = "".join(random.choice("ab") for _ in range(random.randint(0, 5)))
            assert (align(s, t).distance == 0) == (s == t)

    def test_matches_oracle_spot_sample(self):
        # the full exhaustive sweep lives in the acceptance suite
        random.seed(7)
        for _ in range(300):
            s = "".join(random.choice("abc") for _ in range(random.randint(0, 5)))
            t = "".join(random.choice("abc") for _ in range(random.randint(0, 5)))
            assert align(s, t).to_dict() == oracle_align(s, t), (s, t)


class TestClassify:
    def test_all_correct(self):
        taps = [Tap(c, i * 0.1) for i, c in enumerate("abc")]
        k = classify_keystrokes(taps, "abc")
        assert (k.correct, k.incorrect_not_fixed, k.incorrect_fixed,
                k.fixes) == (3, 0, 0, 0)

    def test_fixed_error(self):
        taps = [Tap("a", 0.0), Tap("b", 0.1), Tap("x", 0.2),
                Tap(BACKSPACE, 0.3), Tap("c", 0.4)]
        k = classify_keystrokes(taps, "abc")
        assert (k.correct, k.incorrect_not_fixed, k.incorrect_fixed,
                k.fixes) == (3, 0, 1, 1)

    def test_unfixed_error(self):
        taps = [Tap("a", 0.0), Tap("x", 0.1)]
        k = classify_keystrokes(taps, "ab")
        assert (k.correct, k.incorrect_not_fixed) == (1, 1)

    def test_conservation(self):
        random.seed(8)
        for _ in range(200):
            taps = []
            t = 0.0
            for _ in range(random.randint(0, 12)):
                t += 0.1
                taps.append(Tap(random.choice("ab" + BACKSPACE), t))
            k = classify_keystrokes(taps, "abab")
            assert k.total == len(taps)

    def test_backspace_on_empty_buffer_is_still_a_fix(self):
        taps = [Tap(BACKSPACE, 0.0), Tap("a", 0.1)]
        k = classify_keystrokes(taps, "a")
        assert k.fixes == 1 and k.correct == 1 and k.incorrect_fixed == 0


class TestReport:
    def test_hand_computed_vector(self):
        taps = [Tap("a", 0.5), Tap("b", 1.0), Tap("x", 1.5),
                Tap(BACKSPACE, 2.0), Tap("c", 3.0)]
        rep = report_from_log(taps, "abc", total_time=3.0)
        assert rep.kspc == pytest.approx(5 / 3)
        assert rep.backspaces == 1
        assert rep.immediate_corrections == 1
        assert rep.delayed_corrections == 0
        assert rep.wpm == pytest.approx((3 / 5) / (3 / 60))
        assert rep.uncorrected_error_rate == pytest.approx(0.0)
        assert rep.corrected_error_rate == pytest.approx(100.0 / 4)

    def test_error_free(self):
        taps = [Tap(c, i * 0.2) for i, c in enumerate("abc", start=1)]
        rep = report_from_log(taps, "abc", total_time=0.6)
        assert rep.uncorrected_error_rate == 0.0
        assert rep.corrected_error_rate == 0.0
        assert rep.kspc == 1.0

    def test_uncorrected_rate_one_of_three(self):
        taps = [Tap("a", 0.1), Tap("x", 0.2), Tap("c", 0.3)]
        rep = report_from_log(taps, "abc", total_time=0.3)
        assert rep.uncorrected_error_rate == pytest.approx(100 / 3)

    def test_delayed_correction(self):
        # error at 'x', two more chars typed, then backspaced to it
        taps = [Tap("a", 0.1), Tap("x", 0.2), Tap("b", 0.3), Tap("c", 0.4),
                Tap(BACKSPACE, 0.5), Tap(BACKSPACE, 0.6), Tap(BACKSPACE, 0.7),
                Tap("b", 0.8), Tap("c", 0.9)]
        rep = report_from_log(taps, "abc", total_time=0.9)
        assert rep.immediate_corrections == 0
        assert rep.delayed_corrections == 1
        assert rep.backspaces == 3

    def test_runs_split_immediate_and_delayed(self):
        taps = [Tap("x", 0.1), Tap(BACKSPACE, 0.2), Tap("a", 0.3),
                Tap("b", 0.4), Tap(BACKSPACE, 0.5), Tap(BACKSPACE, 0.6),
                Tap("a", 0.7), Tap("b", 0.8)]
        rep = report_from_log(taps, "ab", total_time=0.8)
        assert rep.immediate_corrections + rep.delayed_corrections == 2

    def test_correction_kinds_partition_runs(self):
        # immediate + delayed equals the maximal backspace-run count, always
        random.seed(11)
        for _ in range(300):
            taps = []
            t = 0.0
            for _ in range(random.randint(0, 15)):
                t += 0.1
                taps.append(Tap(random.choice("ab" + BACKSPACE * 2), t))
            rep = report_from_log(taps, "abab", total_time=max(t, 0.1))
            runs = 0
            prev_bsp = False
            for tap in taps:
                is_bsp = tap.char == BACKSPACE
                if is_bsp and not prev_bsp:
                    runs += 1
                prev_bsp = is_bsp
            assert rep.immediate_corrections + rep.delayed_corrections == runs

    def test_empty_transcription_has_no_kspc(self):
        taps = [Tap("a", 0.1), Tap(BACKSPACE, 0.2)]
        rep = report_from_log(taps, "a", total_time=0.2)
        assert rep.kspc is None

    def test_per_type_rates(self):
        taps = [Tap(c, i * 0.1) for i, c in enumerate("axc", start=1)]
        rep = report_from_log(taps, "abc", total_time=0.3)
        assert rep.substitution_rate == pytest.approx(100 / 3)
        assert rep.insertion_rate == 0.0


class TestAutocorrectAccounting:
    def test_autocorrected_omission_fixes_no_keystroke(self):
        # the correction inserts a missing letter: no tap was erroneous
        taps = [Tap(c, i * 0.1) for i, c in enumerate("welcme ", start=1)]
        k = classify_keystrokes(taps, "welcome ",
                                autocorrects=[(6, "welcme", "welcome")])
        assert k.fixes == 0
        assert k.incorrect_fixed == 0
        assert k.correct == 7
        assert k.total == len(taps)

    def test_substituted_word_char(self):
        taps = [Tap(c, i * 0.1) for i, c in enumerate("cet ", start=1)]
        k = classify_keystrokes(taps, "cat ",
                                autocorrects=[(3, "cet", "cat")])
        assert k.incorrect_fixed == 1
        assert k.correct == 3  # c, t, space survive as correct


class TestAggregate:
    def _rep(self, wpm):
        return MetricsReport(wpm=wpm, uncorrected_error_rate=0,
                             corrected_error_rate=0, kspc=1, backspaces=0,
                             immediate_corrections=0, delayed_corrections=0,
                             insertion_rate=0, omission_rate=0,
                             substitution_rate=0, transposition_rate=0)

    def test_single_report_sd_zero(self):
        agg = aggregate([self._rep(20.0)])
        assert agg["WPM"] == (20.0, 0.0)

    def test_two_values(self):
        agg = aggregate([self._rep(20.0), self._rep(30.0)])
        assert agg["WPM"][0] == pytest.approx(25.0)
        assert agg["WPM"][1] == pytest.approx(math.sqrt(50.0))

    def test_identical_reports(self):
        agg = aggregate([self._rep(10.0)] * 5)
        assert agg["WPM"] == (10.0, 0.0)

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_csv_export(self):
        text = reports_to_csv([self._rep(20.0)])
        header = text.splitlines()[0]
        assert header.startswith("WPM,Uncorrected error (%)")
        assert "KSPC" in header
