"""The sixteen-metric suite: thresholding, point/range/affiliation metrics,
plain and buffered AUCs, and the best-over-thresholds report."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsadbench.core import ScoreSeries
from tsadbench.errors import NoTruthEvents, SingleClassTruth
from tsadbench.metrics import (
    DEFAULT_PERCENTILES,
    LABEL_METRICS,
    METRIC_NAMES,
    RangeParams,
    SCORE_METRICS,
    ThresholdPolicy,
    VusParams,
    affiliation,
    auc_pr,
    auc_roc,
    evaluate_all,
    point_adjust,
    point_metrics,
    r_auc,
    range_pr,
    smooth_labels,
    threshold,
    vus,
)

from _helpers import labeled
from _oracles import (
    affiliation_oracle,
    auc_pr_curve_oracle,
    auc_roc_pairs_oracle,
    point_adjust_oracle,
    point_metrics_oracle,
    r_auc_oracle,
    range_pr_oracle,
    smooth_labels_oracle,
    vus_dense_oracle,
)

binary_vectors = st.lists(st.integers(0, 1), min_size=1, max_size=40)


def two_class_case(min_size=4, max_size=30):
    """Scores plus a truth vector containing both classes."""

    @st.composite
    def build(draw):
        size = draw(st.integers(min_size, max_size))
        scores = draw(
            st.lists(
                st.floats(-5, 5, allow_nan=False, allow_infinity=False),
                min_size=size,
                max_size=size,
            )
        )
        n_pos = draw(st.integers(1, size - 1))
        positions = draw(st.permutations(range(size)))
        truth = [0] * size
        for p in positions[:n_pos]:
            truth[p] = 1
        return np.asarray(scores), np.asarray(truth, dtype=np.uint8)

    return build()


class TestThreshold:
    def test_quarter_of_four(self):
        preds = threshold(np.array([1.0, 2.0, 3.0, 4.0]), 25)
        assert preds.preds.tolist() == [0, 0, 0, 1]
        assert preds.percentile == 25.0

    def test_tie_flooding(self):
        preds = threshold(np.array([1.0, 2.0, 3.0, 3.0]), 25)
        assert preds.preds.tolist() == [0, 0, 1, 1]

    def test_all_equal_floods_everything(self):
        preds = threshold(np.full(10, 2.0), 10)
        assert preds.preds.tolist() == [1] * 10

    def test_at_least_one_point(self):
        preds = threshold(np.arange(5.0), 0.1)
        assert preds.preds.sum() == 1
        assert preds.preds[-1] == 1

    def test_score_series_offset_carried(self):
        scores = ScoreSeries(np.arange(4.0), aligned_offset=7)
        assert threshold(scores, 25).aligned_offset == 7

    def test_percentile_bounds(self):
        for bad in (0, 100, -1, 101):
            with pytest.raises(ValueError):
                threshold(np.arange(4.0), bad)

    @given(
        st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=60),
        st.sampled_from(DEFAULT_PERCENTILES),
    )
    def test_nearest_rank_contract(self, values, percentile):
        scores = np.asarray(values)
        preds = threshold(scores, percentile).preds
        k = min(len(values), max(1, math.ceil(percentile / 100 * len(values))))
        assert preds.sum() >= k
        if preds.sum() < len(values):
            assert scores[preds == 1].min() > scores[preds == 0].max()

    def test_policy_validation(self):
        assert ThresholdPolicy().percentiles == DEFAULT_PERCENTILES
        with pytest.raises(ValueError):
            ThresholdPolicy(())
        with pytest.raises(ValueError):
            ThresholdPolicy((5.0, 1.0))
        with pytest.raises(ValueError):
            ThresholdPolicy((0.0, 5.0))


class TestPointMetrics:
    def test_mixed_fixture(self):
        row = point_metrics([0, 1, 1, 0], [0, 1, 0, 0])
        assert row == {"Acc": 0.75, "P": 0.5, "R": 1.0, "F1": pytest.approx(2 / 3)}

    def test_zero_over_zero_convention(self):
        row = point_metrics([0, 0, 0], [0, 0, 0])
        assert row == {"Acc": 1.0, "P": 0.0, "R": 0.0, "F1": 0.0}

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            point_metrics([0, 1], [0, 1, 0])

    @given(binary_vectors, binary_vectors)
    def test_matches_confusion_oracle(self, preds, truth):
        size = min(len(preds), len(truth))
        preds, truth = preds[:size], truth[:size]
        got = point_metrics(preds, truth)
        expected = point_metrics_oracle(preds, truth)
        for name in ("Acc", "P", "R", "F1"):
            assert got[name] == pytest.approx(expected[name], abs=1e-12)


class TestPointAdjust:
    def test_single_hit_floods_event(self):
        truth = labeled(10, [(3, 7)])
        preds = labeled(10, [(4, 5)])
        assert point_adjust(preds, truth).tolist() == labeled(10, [(3, 7)]).tolist()

    def test_miss_stays_missed(self):
        truth = labeled(10, [(3, 7)])
        preds = labeled(10, [(0, 1)])
        assert point_adjust(preds, truth).tolist() == preds.tolist()

    def test_false_positives_survive(self):
        truth = labeled(10, [(3, 5)])
        preds = labeled(10, [(4, 5), (8, 9)])
        adjusted = point_adjust(preds, truth)
        assert adjusted[8] == 1
        assert adjusted[3] == 1

    @given(binary_vectors, binary_vectors)
    def test_matches_oracle_and_inflates(self, preds, truth):
        size = min(len(preds), len(truth))
        preds, truth = preds[:size], truth[:size]
        adjusted = point_adjust(preds, truth)
        assert adjusted.tolist() == point_adjust_oracle(preds, truth)
        # adjustment only adds predictions, so recall can only go up
        assert np.all(adjusted >= np.asarray(preds, dtype=np.uint8))
        raw_recall = point_metrics_oracle(preds, truth)["R"]
        adj_recall = point_metrics_oracle(adjusted.tolist(), truth)["R"]
        assert adj_recall >= raw_recall


class TestRangePr:
    def test_half_overlap(self):
        truth = labeled(12, [(5, 9)])
        preds = labeled(12, [(3, 7)])
        row = range_pr(preds, truth)
        assert row["R-P"] == pytest.approx(0.5)
        assert row["R-R"] == pytest.approx(0.5)
        assert row["R-F1"] == pytest.approx(0.5)

    def test_exact_match(self):
        truth = labeled(10, [(2, 5), (7, 9)])
        row = range_pr(truth, truth)
        assert row == {"R-P": 1.0, "R-R": 1.0, "R-F1": 1.0}

    def test_reciprocal_fragmentation_penalty(self):
        truth = labeled(12, [(2, 8)])
        solid = labeled(12, [(2, 6)])
        split = labeled(12, [(2, 4), (5, 7)])
        solid_r = range_pr(solid, truth)["R-R"]
        split_r = range_pr(split, truth)["R-R"]
        assert solid_r == pytest.approx(4 / 6)
        assert split_r == pytest.approx(0.5 * 4 / 6)
        assert range_pr(split, truth, RangeParams(cardinality="one"))["R-R"] == pytest.approx(4 / 6)

    def test_empty_sides(self):
        truth = labeled(8, [(2, 4)])
        nothing = labeled(8, [])
        assert range_pr(nothing, truth) == {"R-P": 0.0, "R-R": 0.0, "R-F1": 0.0}
        assert range_pr(truth, nothing) == {"R-P": 0.0, "R-R": 0.0, "R-F1": 0.0}

    def test_existence_credit(self):
        truth = labeled(20, [(0, 10)])
        preds = labeled(20, [(9, 10)])
        plain = range_pr(preds, truth, RangeParams(alpha=0.0))["R-R"]
        weighted = range_pr(preds, truth, RangeParams(alpha=0.5))["R-R"]
        assert plain == pytest.approx(0.1)
        assert weighted == pytest.approx(0.5 + 0.5 * 0.1)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            RangeParams(alpha=1.5)
        with pytest.raises(ValueError):
            RangeParams(bias="sideways")
        with pytest.raises(ValueError):
            RangeParams(cardinality="two")

    @given(
        binary_vectors,
        binary_vectors,
        st.floats(0, 1),
        st.sampled_from(("flat", "front", "back", "middle")),
        st.sampled_from(("one", "reciprocal")),
    )
    def test_matches_oracle(self, preds, truth, alpha, bias, cardinality):
        size = min(len(preds), len(truth))
        preds, truth = preds[:size], truth[:size]
        got = range_pr(preds, truth, RangeParams(alpha=alpha, bias=bias, cardinality=cardinality))
        expected = range_pr_oracle(preds, truth, alpha, bias, cardinality)
        for name in ("R-P", "R-R", "R-F1"):
            assert got[name] == pytest.approx(expected[name], abs=1e-12)


class TestAffiliation:
    def test_exact_match_is_perfect(self):
        truth = labeled(20, [(8, 12)])
        row = affiliation(truth, truth)
        assert row == {"Aff-P": 1.0, "Aff-R": 1.0, "Aff-F1": 1.0}

    def test_offset_prediction_survival(self):
        # single event [8, 12) in a 20-point zone, one prediction at 13:
        # 14 of 20 zone points are at least as far from the event, and the
        # same survival count falls out on the recall side
        truth = labeled(20, [(8, 12)])
        preds = labeled(20, [(13, 14)])
        row = affiliation(preds, truth)
        assert row["Aff-P"] == pytest.approx(0.7)
        assert row["Aff-R"] == pytest.approx(0.7)
        assert row["Aff-F1"] == pytest.approx(0.7)
        assert row == pytest.approx(affiliation_oracle(preds.tolist(), truth.tolist()))

    def test_no_predictions(self):
        truth = labeled(10, [(2, 4)])
        row = affiliation(labeled(10, []), truth)
        assert row == {"Aff-P": 0.0, "Aff-R": 0.0, "Aff-F1": 0.0}

    def test_no_truth_events(self):
        with pytest.raises(NoTruthEvents):
            affiliation(labeled(5, [(1, 2)]), labeled(5, []))

    def test_two_zone_split(self):
        truth = labeled(14, [(2, 4), (10, 12)])
        preds = labeled(14, [(5, 6)])
        row = affiliation(preds, truth)
        expected = affiliation_oracle(preds.tolist(), truth.tolist())
        assert row == pytest.approx(expected)
        # the lone prediction sits in the first zone, so the second event
        # contributes recall 0 and the average is dragged down
        assert row["Aff-R"] < 0.5

    def test_exhaustive_small_lengths(self):
        length = 6
        for truth_bits in range(1, 2**length):
            truth = [(truth_bits >> i) & 1 for i in range(length)]
            for pred_bits in range(2**length):
                preds = [(pred_bits >> i) & 1 for i in range(length)]
                got = affiliation(np.array(preds), np.array(truth))
                expected = affiliation_oracle(preds, truth)
                for name in ("Aff-P", "Aff-R", "Aff-F1"):
                    assert got[name] == pytest.approx(expected[name], abs=1e-12), (
                        preds,
                        truth,
                    )


class TestCurves:
    def test_perfect_separation(self):
        assert auc_roc([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1]) == 1.0
        assert auc_pr([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1]) == 1.0

    def test_constant_scores(self):
        assert auc_roc([1.0, 1.0, 1.0, 1.0], [0, 1, 0, 1]) == pytest.approx(0.5)

    def test_three_quarters(self):
        assert auc_roc([4.0, 3.0, 2.0, 1.0], [1, 0, 1, 0]) == pytest.approx(0.75)

    def test_single_class_rejected(self):
        for metric in (auc_roc, auc_pr):
            with pytest.raises(SingleClassTruth):
                metric([1.0, 2.0], [1, 1])
            with pytest.raises(SingleClassTruth):
                metric([1.0, 2.0], [0, 0])

    def test_monotone_invariance(self):
        rng = np.random.default_rng(0)
        scores = rng.normal(size=50)
        truth = (rng.random(50) < 0.3).astype(int)
        truth[0], truth[1] = 0, 1
        for metric in (auc_roc, auc_pr):
            base = metric(scores, truth)
            assert metric(3.0 * scores + 11.0, truth) == pytest.approx(base, abs=1e-12)
            assert metric(np.tanh(scores), truth) == pytest.approx(base, abs=1e-12)

    @given(two_class_case())
    def test_roc_matches_pair_counting(self, case):
        scores, truth = case
        assert auc_roc(scores, truth) == pytest.approx(
            auc_roc_pairs_oracle(scores.tolist(), truth.tolist()), abs=1e-9
        )

    @given(two_class_case())
    def test_pr_matches_curve_oracle(self, case):
        scores, truth = case
        assert auc_pr(scores, truth) == pytest.approx(
            auc_pr_curve_oracle(scores.tolist(), truth.tolist()), abs=1e-9
        )


class TestSmoothLabels:
    def test_zero_buffer_is_identity(self):
        truth = labeled(10, [(3, 5)])
        assert smooth_labels(truth, 0.0).tolist() == truth.astype(float).tolist()

    def test_shoulder_values(self):
        truth = labeled(10, [(5, 6)])
        smoothed = smooth_labels(truth, 2.0)
        assert smoothed[5] == 1.0
        assert smoothed[4] == pytest.approx(math.sqrt(0.5))
        assert smoothed[6] == pytest.approx(math.sqrt(0.5))
        assert smoothed[3] == 0.0
        assert smoothed[7] == 0.0

    def test_no_events_passthrough(self):
        truth = labeled(6, [])
        assert smooth_labels(truth, 4.0).tolist() == [0.0] * 6

    def test_negative_buffer_rejected(self):
        with pytest.raises(ValueError):
            smooth_labels(labeled(5, [(1, 2)]), -1.0)

    @given(binary_vectors, st.floats(0, 10))
    def test_matches_oracle(self, truth, ell):
        got = smooth_labels(np.asarray(truth), ell)
        expected = smooth_labels_oracle(truth, ell)
        assert np.allclose(got, expected, atol=1e-12)
        assert got.min() >= 0.0 and got.max() <= 1.0


class TestBufferedCurves:
    def test_zero_buffer_reduces_to_auc(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=30)
        truth = labeled(30, [(10, 14), (22, 25)])
        assert r_auc(scores, truth, 0.0, "roc") == auc_roc(scores, truth)
        assert r_auc(scores, truth, 0.0, "pr") == auc_pr(scores, truth)

    def test_unknown_curve(self):
        with pytest.raises(ValueError):
            r_auc(np.arange(6.0), labeled(6, [(2, 4)]), 1.0, "det")

    @given(two_class_case(min_size=6, max_size=20), st.floats(0, 8), st.sampled_from(("roc", "pr")))
    def test_matches_oracle(self, case, ell, curve):
        scores, truth = case
        assert r_auc(scores, truth, ell, curve) == pytest.approx(
            r_auc_oracle(scores.tolist(), truth.tolist(), ell, curve), abs=1e-9
        )

    def test_vus_zero_grid_equals_auc(self):
        scores = np.arange(12.0)
        truth = labeled(12, [(7, 10)])
        assert vus(scores, truth, VusParams(ell_max=0.0), "roc") == pytest.approx(
            auc_roc(scores, truth)
        )

    def test_vus_matches_same_grid_oracle(self):
        rng = np.random.default_rng(5)
        scores = rng.normal(size=12)
        truth = labeled(12, [(4, 7)])
        for curve in ("roc", "pr"):
            got = vus(scores, truth, VusParams(ell_max=4.0, grid=201), curve)
            expected = vus_dense_oracle(scores.tolist(), truth.tolist(), 4.0, curve, grid=201)
            assert got == pytest.approx(expected, abs=1e-9)

    def test_vus_default_grid_near_dense(self):
        rng = np.random.default_rng(6)
        scores = rng.normal(size=12)
        truth = labeled(12, [(3, 5), (9, 11)])
        got = vus(scores, truth, VusParams(ell_max=16.0), "roc")
        dense = vus_dense_oracle(scores.tolist(), truth.tolist(), 16.0, "roc")
        assert 0.0 <= got <= 1.0
        assert got == pytest.approx(dense, abs=0.02)

    def test_vus_param_validation(self):
        with pytest.raises(ValueError):
            VusParams(ell_max=-1.0)
        with pytest.raises(ValueError):
            VusParams(grid=1)


class TestEvaluateAll:
    def _case(self, length=40, events=((20, 24),), seed=0):
        truth = labeled(length, list(events))
        rng = np.random.default_rng(seed)
        scores = rng.normal(size=length) + 4.0 * truth
        return scores, truth

    def test_perfect_scorer(self):
        truth = labeled(40, [(20, 24)])
        report, _ = evaluate_all(truth.astype(float), truth)
        for name in LABEL_METRICS:
            assert report.entries[name] == pytest.approx(1.0), name
        assert report.entries["A-P"] == pytest.approx(1.0)
        assert report.entries["A-R"] == pytest.approx(1.0)

    def test_exactly_sixteen_metrics(self):
        scores, truth = self._case()
        report, per_threshold = evaluate_all(scores, truth)
        assert set(report.entries) == set(METRIC_NAMES)
        assert len(METRIC_NAMES) == 16
        assert set(per_threshold) == set(DEFAULT_PERCENTILES)
        for row in per_threshold.values():
            assert set(row) == set(LABEL_METRICS)

    def test_best_dominates_sweep(self):
        scores, truth = self._case(seed=3)
        report, per_threshold = evaluate_all(scores, truth)
        for name in LABEL_METRICS:
            best = max(row[name] for row in per_threshold.values())
            assert report.entries[name] == pytest.approx(best)
            assert report.best_thresholds[name] in DEFAULT_PERCENTILES

    def test_threshold_tie_goes_to_smaller_percentile(self):
        # L=200 makes the 0.1% and 0.5% cutoffs flag the same single point
        truth = labeled(200, [(100, 101)])
        scores = np.zeros(200)
        scores[100] = 1.0
        report, per_threshold = evaluate_all(scores, truth)
        assert per_threshold[0.1]["F1"] == per_threshold[0.5]["F1"] == 1.0
        assert report.threshold_used == 0.1
        assert report.best_thresholds["F1"] == 0.1

    def test_point_adjust_off_by_default(self):
        # partial hit on a long event: raw F1 is mediocre, adjusted F1 jumps
        truth = labeled(60, [(10, 30)])
        scores = np.zeros(60)
        scores[12] = 5.0
        scores[45] = 4.0
        raw, _ = evaluate_all(scores, truth)
        adjusted, _ = evaluate_all(scores, truth, enable_point_adjust=True)
        assert adjusted.entries["F1"] > raw.entries["F1"]
        for name in SCORE_METRICS:
            assert adjusted.entries[name] == raw.entries[name], name

    def test_score_metrics_come_from_raw_scores(self):
        scores, truth = self._case(seed=7)
        report, _ = evaluate_all(scores, truth)
        assert report.entries["A-R"] == pytest.approx(auc_roc(scores, truth))
        assert report.entries["A-P"] == pytest.approx(auc_pr(scores, truth))
        assert report.entries["V-ROC"] == pytest.approx(vus(scores, truth, VusParams(), "roc"))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            evaluate_all(np.arange(5.0), labeled(6, [(1, 2)]))
        with pytest.raises(SingleClassTruth):
            evaluate_all(np.arange(5.0), labeled(5, []))

    def test_report_indexing(self):
        scores, truth = self._case(seed=11)
        report, _ = evaluate_all(scores, truth)
        assert report["F1"] == report.entries["F1"]
        assert report.threshold_used == report.best_thresholds["F1"]
