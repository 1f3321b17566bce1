import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lcprotonets import (
    LabelSet,
    PredictionBatch,
    RunSummary,
    confidence_interval,
    macro_f1,
    micro_f1,
)
from lcprotonets.metrics import degenerate_labels, label_confusion, per_label_f1
from oracles import T_TABLE_975, oracle_macro_f1, oracle_micro_f1


def batch(pairs, active_positions, width=6):
    active = LabelSet.from_positions(active_positions, width)
    return PredictionBatch(
        pairs=tuple(
            (LabelSet.from_positions(t, width), LabelSet.from_positions(p, width))
            for t, p in pairs),
        active=active,
    )


class TestPredictionBatch:
    def test_rejects_pairs_outside_active(self):
        with pytest.raises(ValueError):
            batch([([0], [3])], active_positions=[0, 1])

    def test_rejects_empty_batch(self):
        with pytest.raises(ValueError):
            PredictionBatch(pairs=(), active=LabelSet(1, 2))


class TestF1Fixtures:
    def test_perfect_predictions_are_exactly_one(self):
        b = batch([([0, 1], [0, 1]), ([2], [2])], [0, 1, 2])
        assert macro_f1(b) == 1.0
        assert micro_f1(b) == 1.0

    def test_macro_half_case(self):
        # Label 0 perfectly predicted on both items (F1=1); label 1 never
        # predicted despite 2 positives (F1=0) -> macro = 0.5.
        b = batch([([0, 1], [0]), ([0, 1], [0])], [0, 1])
        assert macro_f1(b) == pytest.approx(0.5, abs=1e-9)

    def test_micro_pooled_six_ninths(self):
        # Pooled TP=3, FP=1, FN=2 -> 2*3/(2*3+1+2) = 6/9.
        b = batch(
            [([0, 1], [0, 1]),   # 2 TP
             ([2], [2, 3]),      # 1 TP, 1 FP
             ([4, 5], [])],      # 2 FN
            [0, 1, 2, 3, 4, 5])
        tp, fp, fn = label_confusion(b)
        assert (tp.sum(), fp.sum(), fn.sum()) == (3, 1, 2)
        assert micro_f1(b) == pytest.approx(6.0 / 9.0, abs=1e-9)

    def test_all_empty_predictions_score_zero(self):
        b = batch([([0], []), ([1], [])], [0, 1])
        assert macro_f1(b) == 0.0
        assert micro_f1(b) == 0.0

    def test_single_label_micro_equals_macro(self):
        b = batch([([0], [0]), ([0], []), ([0], [0])], [0])
        assert micro_f1(b) == pytest.approx(macro_f1(b))

    def test_degenerate_label_scores_zero_and_is_flagged(self):
        b = batch([([0], [0])], [0, 5])
        assert degenerate_labels(b) == (5,)
        assert per_label_f1(b).tolist() == [1.0, 0.0]
        assert macro_f1(b) == pytest.approx(0.5)


class TestF1Properties:
    @staticmethod
    def random_batch(rng, n_items=12, width=5):
        def rand_set():
            k = int(rng.integers(0, width + 1))
            if k == 0:
                return []
            return [int(p) for p in rng.choice(width, size=k, replace=False)]

        pairs = []
        for _ in range(n_items):
            t = rand_set() or [0]
            pairs.append((t, rand_set()))
        return pairs

    def test_matches_set_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            pairs = self.random_batch(rng)
            b = batch(pairs, list(range(5)), width=5)
            true_sets = [frozenset(t) for t, _ in pairs]
            pred_sets = [frozenset(p) for _, p in pairs]
            assert macro_f1(b) == pytest.approx(
                oracle_macro_f1(true_sets, pred_sets, range(5)), abs=1e-12)
            assert micro_f1(b) == pytest.approx(
                oracle_micro_f1(true_sets, pred_sets, range(5)), abs=1e-12)

    def test_invariant_to_item_order(self):
        rng = np.random.default_rng(19)
        pairs = self.random_batch(rng)
        b1 = batch(pairs, list(range(5)), width=5)
        b2 = batch(list(reversed(pairs)), list(range(5)), width=5)
        assert macro_f1(b1) == macro_f1(b2)
        assert micro_f1(b1) == micro_f1(b2)

    def test_invariant_to_label_relabeling(self):
        rng = np.random.default_rng(23)
        pairs = self.random_batch(rng)
        perm = {old: int(new) for old, new in
                enumerate(np.random.default_rng(1).permutation(5))}
        mapped = [([perm[x] for x in t], [perm[x] for x in p])
                  for t, p in pairs]
        b1 = batch(pairs, list(range(5)), width=5)
        b2 = batch(mapped, list(range(5)), width=5)
        assert macro_f1(b1) == pytest.approx(macro_f1(b2))
        assert micro_f1(b1) == pytest.approx(micro_f1(b2))

    def test_scores_bounded(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            b = batch(self.random_batch(rng), list(range(5)), width=5)
            assert 0.0 <= macro_f1(b) <= 1.0
            assert 0.0 <= micro_f1(b) <= 1.0

    def test_perfect_item_never_decreases_micro(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            pairs = self.random_batch(rng)
            before = micro_f1(batch(pairs, list(range(5)), width=5))
            extended = pairs + [([2, 3], [2, 3])]
            after = micro_f1(batch(extended, list(range(5)), width=5))
            assert after >= before - 1e-12

    def test_identical_per_label_confusions_make_macro_equal_micro(self):
        # Every label: TP=1, FP=1, FN=1.
        b = batch(
            [([0, 1], [0, 1]),
             ([0, 1], []),
             ([2], [2]),
             ([2], []),
             ([], [0, 1, 2])],
            [0, 1, 2],
        )
        tp, fp, fn = label_confusion(b)
        assert tp.tolist() == [1, 1, 1]
        assert fp.tolist() == [1, 1, 1]
        assert fn.tolist() == [1, 1, 1]
        assert macro_f1(b) == pytest.approx(micro_f1(b))


class TestConfidenceInterval:
    def test_identical_scores_zero_width(self):
        mean, hw = confidence_interval([0.4, 0.4, 0.4])
        assert mean == pytest.approx(0.4)
        assert hw == pytest.approx(0.0)

    def test_two_scores_t_table(self):
        mean, hw = confidence_interval([0.4, 0.6])
        assert mean == pytest.approx(0.5)
        sd = np.std([0.4, 0.6], ddof=1)
        assert hw == pytest.approx(T_TABLE_975[1] * sd / math.sqrt(2), rel=1e-4)
        assert hw == pytest.approx(1.2706, abs=2e-4)

    def test_five_scores_cross_check(self):
        scores = [0.52, 0.49, 0.55, 0.50, 0.53]
        mean, hw = confidence_interval(scores)
        low, high = stats.t.interval(
            0.95, len(scores) - 1, loc=np.mean(scores),
            scale=stats.sem(scores, ddof=1))
        assert mean - hw == pytest.approx(low, abs=1e-12)
        assert mean + hw == pytest.approx(high, abs=1e-12)
        sd = np.std(scores, ddof=1)
        assert hw == pytest.approx(T_TABLE_975[4] * sd / math.sqrt(5), rel=1e-3)

    def test_single_score_rejected(self):
        with pytest.raises(ValueError):
            confidence_interval([0.4])

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=10))
    @settings(max_examples=60)
    def test_half_width_non_negative(self, scores):
        _, hw = confidence_interval(scores)
        assert hw >= 0.0


class TestRunSummary:
    def test_from_scores(self):
        s = RunSummary.from_scores([0.4, 0.6], [0.5, 0.7])
        assert s.macro_mean == pytest.approx(0.5)
        assert s.micro_mean == pytest.approx(0.6)
        assert s.macro_half_width > 0

    def test_single_run_has_nan_width(self):
        s = RunSummary.from_scores([0.4], [0.5])
        assert math.isnan(s.macro_half_width)
        assert math.isnan(s.micro_half_width)
        assert s.macro_mean == 0.4

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            RunSummary.from_scores([0.4], [0.5, 0.6])
