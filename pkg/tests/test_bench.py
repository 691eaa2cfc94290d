import io

import numpy as np
import pytest

from typesim.bench import (BenchError, load_builtin_targets, load_targets,
                           builtin_dictionary, builtin_phrases, run_bench,
                           save_targets, speed_accuracy_sweep)
from typesim.env import RewardParams
from typesim.mechanisms import UserParams, normalize
from typesim.supervisor import PolicyParams


@pytest.fixture(scope="module")
def targets():
    return {t.group: t for t in load_builtin_targets()}


class TestTargets:
    def test_young_adults_level0(self, targets):
        t = targets["young_adults"]
        assert t.level == 0
        assert t.metrics["WPM"].mean == 29.4
        assert t.metrics["WPM"].sd == 8.9
        assert t.participants == 8

    def test_elderly_missing_sd_is_assumed(self, targets):
        t = targets["elderly"]
        stat = t.metrics["Omission errors (%)"]
        assert stat.mean == 10.80
        assert stat.sd is None
        assert stat.assumed_sd
        assert stat.effective_sd() == 1.0

    def test_finnish_kspc(self, targets):
        t = targets["finnish_typists"]
        assert t.metrics["KSPC"].mean == 1.26
        assert t.metrics["KSPC"].sd == 0.37
        assert t.manual_correction and t.gaze_data

    def test_six_groups_three_levels(self, targets):
        assert len(targets) == 6
        assert {t.level for t in targets.values()} == {0, 1, 2}

    def test_roundtrip_identity(self):
        first = load_builtin_targets()
        text = save_targets(first)
        second = load_targets(io.StringIO(text))
        assert save_targets(second) == text
        assert [t.group for t in second] == [t.group for t in first]
        for a, b in zip(first, second):
            assert a.metrics == b.metrics

    def test_negative_sd_rejected(self):
        bad = ("group,level,metric,mean,sd,assumed_sd_flag\n"
               "g,0,WPM,10,-1,0\n")
        with pytest.raises(BenchError):
            load_targets(io.StringIO(bad))

    def test_missing_columns_rejected(self):
        with pytest.raises(BenchError):
            load_targets(io.StringIO("a,b\n1,2\n"))

    def test_human_orderings(self, targets):
        ya = targets["young_adults"].error_rate_ordering()
        assert [m.split()[0] for m in ya] == [
            "Substitution", "Insertion", "Omission", "Transposition"]
        eld = targets["elderly"].error_rate_ordering()
        assert eld[0].startswith("Omission")
        pk = targets["parkinsons"].error_rate_ordering()
        assert pk[0].startswith("Substitution")


class TestBundles:
    def test_phrase_set(self):
        phrases = builtin_phrases()
        assert len(phrases) == 100
        for p in phrases:
            assert 10 <= len(p) <= 32
            assert all(c.islower() or c == " " for c in p)

    def test_dictionary_covers_phrases(self):
        words = set(builtin_dictionary().words)
        for p in builtin_phrases():
            for w in p.split():
                assert w in words, w


class TestRunBench:
    def test_small_run_shape(self, targets):
        up = UserParams(f_k=0.07, k_bounce=0.01)
        rep = run_bench(targets["young_adults"], up, PolicyParams(),
                        RewardParams(), n_episodes=20,
                        phrase_set=builtin_phrases()[:5], seed=3, scaled=True)
        assert rep.group == "young_adults"
        assert len(rep.rows) == 5
        assert {r["metric"] for r in rep.rows} == set(
            targets["young_adults"].metrics)
        assert rep.scaled
        assert len(rep.simulated_ordering) == 4
        assert rep.deviation_notes
        text = rep.to_table()
        assert "within 1 SD" in text

    def test_determinism(self, targets):
        up = UserParams(f_k=0.07)
        a = run_bench(targets["young_adults"], up, PolicyParams(),
                      RewardParams(), 15, builtin_phrases()[:3], seed=9)
        b = run_bench(targets["young_adults"], up, PolicyParams(),
                      RewardParams(), 15, builtin_phrases()[:3], seed=9)
        da, db = a.to_dict(), b.to_dict()
        da.pop("runtime_seconds")
        db.pop("runtime_seconds")
        assert da == db

    def test_zero_episodes_rejected(self, targets):
        with pytest.raises(BenchError):
            run_bench(targets["young_adults"], UserParams(), PolicyParams(),
                      RewardParams(), 0, builtin_phrases()[:2], seed=0)

    def test_ordering_scale_invariance(self, targets):
        """Sorting by rate is unchanged under positive rescaling."""
        rates = {"Insertion errors (%)": 2.0, "Omission errors (%)": 1.0,
                 "Substitution errors (%)": 4.0,
                 "Transposition errors (%)": 0.5}
        order1 = [m for m, _ in sorted(rates.items(), key=lambda kv: -kv[1])]
        order2 = [m for m, _ in sorted(
            ((m, 7.3 * v) for m, v in rates.items()), key=lambda kv: -kv[1])]
        assert order1 == order2


class TestSweep:
    def test_zero_sd_uses_base_params(self):
        up = UserParams()
        rows = speed_accuracy_sweep(up, PolicyParams(), RewardParams(),
                                    sd=0.0, n_runs=3,
                                    phrase_set=builtin_phrases()[:3], seed=1)
        assert len(rows) == 3
        assert all("wpm" in r and "corrected_errors" in r for r in rows)

    def test_perturbations_stay_normalized(self):
        # denormalize clips into bounds, so every run must be constructible
        up = UserParams()
        rows = speed_accuracy_sweep(up, PolicyParams(), RewardParams(),
                                    sd=0.5, n_runs=12,
                                    phrase_set=builtin_phrases()[:4], seed=2)
        assert len(rows) == 12

    def test_rows_have_distinct_outcomes(self):
        up = UserParams(f_k=0.09, k_bounce=0.03)
        rows = speed_accuracy_sweep(up, PolicyParams(), RewardParams(),
                                    sd=0.1, n_runs=10,
                                    phrase_set=builtin_phrases()[:5], seed=3)
        assert len({r["wpm"] for r in rows}) > 1
