"""Metric functions against hand-frozen values and brute-force oracles."""

import math

import numpy as np
import pytest

import oracles
from conftest import make_run, scores_with_auc
from fairrank.errors import (DegenerateLabels, EmptyInput, MixedShape,
                             NonBinaryAttribute, UndefinedRate)
from fairrank.metrics import (ConfusionRates, MetricConfig, aggregate_seeds,
                              auc, bce, bundle_scalars, confusion_rates, ece,
                              eq_odd, evaluate_run, select_threshold,
                              tpr_at_tnr, underdiagnosis_rate)


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.9, 0.8, 0.3, 0.2], [1, 1, 0, 0]) == 1.0

    def test_single_tie_gives_half(self):
        assert auc([0.5, 0.5], [1, 0]) == 0.5

    def test_four_pair_hand_value(self):
        assert auc([0.9, 0.7, 0.6, 0.2], [1, 0, 1, 0]) == pytest.approx(0.75, abs=1e-15)

    def test_degenerate_labels_rejected(self):
        with pytest.raises(DegenerateLabels):
            auc([0.1, 0.9], [1, 1])
        with pytest.raises(DegenerateLabels):
            auc([0.1, 0.9], [0, 0])

    def test_matches_pairwise_oracle_with_ties(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            n = int(rng.integers(2, 51))
            scores = rng.choice([0.1, 0.25, 0.4, 0.6, 0.75, 0.9], size=n)
            labels = rng.integers(0, 2, size=n)
            labels[0], labels[1] = 0, 1
            got = auc(scores, labels)
            want = oracles.auc_pairwise(scores.tolist(), labels.tolist())
            assert got == pytest.approx(want, abs=1e-12)

    def test_complement_identity_exact(self):
        rng = np.random.default_rng(43)
        for _ in range(300):
            n = int(rng.integers(2, 40))
            scores = rng.random(n)
            labels = rng.integers(0, 2, size=n)
            labels[0], labels[1] = 0, 1
            flipped = (1.0 - scores).tolist()
            assert auc(flipped, labels) == 1.0 - auc(scores, labels)

    def test_rank_order_invariance_exact(self):
        rng = np.random.default_rng(44)
        scores = rng.random(37)
        labels = rng.integers(0, 2, size=37)
        labels[0], labels[1] = 0, 1
        base = auc(scores, labels)
        assert auc(np.sqrt(scores), labels) == base
        assert auc(scores / 2.0 + 0.25, labels) == base

    def test_exact_fraction_construction(self):
        scores, labels = scores_with_auc(8807, 100, 100)
        assert auc(scores, labels) == 8807 / 10000


class TestBce:
    def test_half_confidence_is_ln2(self):
        assert bce([0.5], [1]) == pytest.approx(math.log(2), abs=1e-12)

    def test_saturated_score_clamped(self):
        assert 0 < bce([1.0], [1]) < 1e-6

    def test_two_term_hand_value(self):
        assert bce([0.9, 0.2], [1, 0]) == pytest.approx(0.164252, abs=1e-6)
        assert bce([0.9, 0.2], [1, 0]) == pytest.approx(
            0.5 * (-math.log(0.9) - math.log(0.8)), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            bce([], [])


class TestEce:
    def test_single_bin_gap(self):
        assert ece([0.8] * 4, [1] * 4, bins=10) == pytest.approx(0.2, abs=1e-12)

    def test_bin_calibrated_is_zero(self):
        scores = [0.3] * 10
        labels = [1] * 3 + [0] * 7
        assert ece(scores, labels, bins=10) == pytest.approx(0.0, abs=1e-12)

    def test_two_bin_hand_value(self):
        got = ece([0.2, 0.2, 0.9, 0.9], [0, 1, 1, 1], bins=10)
        assert got == pytest.approx(0.20, abs=1e-12)

    def test_matches_membership_oracle(self):
        rng = np.random.default_rng(45)
        for _ in range(150):
            n = int(rng.integers(1, 60))
            scores = np.round(rng.random(n), 3).tolist()
            labels = rng.integers(0, 2, size=n).tolist()
            bins = int(rng.integers(1, 15))
            assert ece(scores, labels, bins) == pytest.approx(
                oracles.ece_loop(scores, labels, bins), abs=1e-12)

    def test_score_one_lands_in_last_bin(self):
        assert ece([1.0], [1], bins=10) == pytest.approx(0.0, abs=1e-12)

    def test_permutation_invariant_and_bounded(self):
        rng = np.random.default_rng(46)
        scores = rng.random(50).tolist()
        labels = rng.integers(0, 2, size=50).tolist()
        base = ece(scores, labels, 10)
        perm = rng.permutation(50)
        shuffled = ece([scores[i] for i in perm], [labels[i] for i in perm], 10)
        assert shuffled == pytest.approx(base, abs=1e-12)
        assert 0.0 <= base <= 1.0

    def test_empty_and_bad_bins_rejected(self):
        with pytest.raises(EmptyInput):
            ece([], [], 10)
        with pytest.raises(ValueError):
            ece([0.5], [1], 0)


class TestSelectThreshold:
    def test_perfect_split(self):
        assert select_threshold([0.9, 0.8, 0.4, 0.1], [1, 1, 0, 0]) == 0.8

    def test_single_positive_sample(self):
        assert select_threshold([0.6], [1]) == 0.6

    def test_two_sample_split(self):
        assert select_threshold([0.3, 0.7], [0, 1]) == 0.7

    def test_no_positives_rejected(self):
        with pytest.raises(DegenerateLabels):
            select_threshold([0.3, 0.7], [0, 0])

    def test_matches_sweep_oracle(self):
        rng = np.random.default_rng(47)
        for _ in range(200):
            n = int(rng.integers(1, 40))
            scores = np.round(rng.random(n), 2).tolist()
            labels = rng.integers(0, 2, size=n).tolist()
            labels[0] = 1
            best_t, best_f1 = oracles.f1_threshold_sweep(scores, labels)
            assert select_threshold(scores, labels) == best_t

    def test_min_rule_is_degenerate_by_construction(self):
        # the conventional reading of the rule name: returns the candidate
        # with the worst F1 (ties toward the largest threshold)
        scores, labels = [0.9, 0.8, 0.4, 0.1], [1, 1, 0, 0]
        t = select_threshold(scores, labels, rule="min_f1")
        assert t == 0.9  # F1 = 2/3 there, tied with t in {0, 0.1}, largest wins
        assert t != select_threshold(scores, labels)

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            select_threshold([0.5], [1], rule="max_f2")


class TestConfusionRates:
    def test_hand_counts(self):
        # 3 tp, 1 fn, 2 fp, 4 tn at threshold 0.5
        scores = [0.9, 0.8, 0.7, 0.2] + [0.6, 0.55] + [0.1, 0.2, 0.3, 0.4]
        labels = [1, 1, 1, 1] + [0, 0] + [0, 0, 0, 0]
        r = confusion_rates(scores, labels, 0.5)
        assert (r.tp, r.fn, r.fp, r.tn) == (3, 1, 2, 4)
        assert r.tpr == pytest.approx(0.75)
        assert r.fnr == pytest.approx(0.25)
        assert r.fpr == pytest.approx(1 / 3)
        assert r.tnr == pytest.approx(2 / 3)

    def test_threshold_zero_everything_positive(self):
        r = confusion_rates([0.2, 0.8, 0.3, 0.9], [1, 1, 0, 0], 0.0)
        assert r.tpr == 1.0 and r.fpr == 1.0

    def test_threshold_above_max(self):
        r = confusion_rates([0.2, 0.8, 0.3, 0.9], [1, 1, 0, 0], 0.95)
        assert r.tpr == 0.0 and r.fpr == 0.0

    def test_undefined_rates_are_none(self):
        r = confusion_rates([0.2, 0.8], [1, 1], 0.5)
        assert r.tnr is None and r.fpr is None
        assert r.tpr is not None

    def test_complement_sums_exact(self):
        rng = np.random.default_rng(48)
        for _ in range(300):
            n = int(rng.integers(2, 60))
            scores = rng.random(n)
            labels = rng.integers(0, 2, size=n)
            labels[0], labels[1] = 0, 1
            r = confusion_rates(scores, labels, float(rng.random()))
            assert r.tpr + r.fnr == 1.0
            assert r.tnr + r.fpr == 1.0


class TestTprAtTnr:
    def test_enumerated_example(self):
        scores = [0.1, 0.2, 0.3, 0.4, 0.5] + [0.45, 0.6, 0.7, 0.8]
        labels = [0] * 5 + [1] * 4
        assert tpr_at_tnr(scores, labels, 0.8) == 1.0

    def test_perfect_separation_any_target(self):
        assert tpr_at_tnr([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1], 1.0) == 1.0

    def test_all_identical_scores(self):
        assert tpr_at_tnr([0.5, 0.5, 0.5, 0.5], [0, 0, 1, 1], 0.8) == 0.0

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateLabels):
            tpr_at_tnr([0.5, 0.6], [1, 1], 0.8)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(49)
        for _ in range(200):
            n = int(rng.integers(2, 50))
            scores = np.round(rng.random(n), 2).tolist()
            labels = rng.integers(0, 2, size=n).tolist()
            labels[0], labels[1] = 0, 1
            target = float(rng.choice([0.5, 0.8, 0.9, 0.95]))
            assert tpr_at_tnr(scores, labels, target) == pytest.approx(
                oracles.tpr_at_tnr_enum(scores, labels, target), abs=1e-15)


def rates(tpr, fpr):
    return ConfusionRates(1, 1, 1, 1, 0.5, tpr, 1.0 - fpr, fpr, 1.0 - tpr)


class TestEqOdd:
    def test_identical_rates_score_one(self):
        assert eq_odd(rates(0.8, 0.2), rates(0.8, 0.2)).eqodd == 1.0

    def test_hand_value(self):
        r = eq_odd(rates(0.9, 0.2), rates(0.8, 0.3))
        assert r.eqopp0 == pytest.approx(0.9, abs=1e-12)
        assert r.eqopp1 == pytest.approx(0.9, abs=1e-12)
        assert r.eqodd == pytest.approx(0.9, abs=1e-12)

    def test_maximal_disparity(self):
        assert eq_odd(rates(1.0, 0.0), rates(0.0, 1.0)).eqodd == 0.0

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(50)
        for _ in range(100):
            a = rates(float(rng.random()), float(rng.random()))
            b = rates(float(rng.random()), float(rng.random()))
            ab, ba = eq_odd(a, b), eq_odd(b, a)
            assert ab.eqodd == ba.eqodd
            assert 0.0 <= ab.eqodd <= 1.0

    def test_undefined_rate_rejected(self):
        broken = ConfusionRates(0, 1, 1, 0, 0.5, None, 0.5, 0.5, None)
        with pytest.raises(UndefinedRate):
            eq_odd(broken, rates(0.5, 0.5))

    def test_non_binary_attribute_rejected(self):
        with pytest.raises(NonBinaryAttribute):
            eq_odd(rates(0.5, 0.5), rates(0.5, 0.5), rates(0.5, 0.5))
        with pytest.raises(NonBinaryAttribute):
            eq_odd(rates(0.5, 0.5))


class TestUnderdiagnosisRate:
    def test_convention_switch(self):
        r = rates(0.75, 0.4)
        assert underdiagnosis_rate(r, positive_means_finding=True) == r.fnr
        assert underdiagnosis_rate(r, positive_means_finding=False) == r.fpr


class TestEvaluateRun:
    def test_bundle_internal_consistency(self):
        run = make_run([0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, 0.1],
                       [1, 0, 1, 0, 1, 0, 1, 0],
                       [0, 0, 0, 0, 1, 1, 1, 1])
        bundle = evaluate_run(run)
        defined = [g.auc for g in bundle.per_group if g.auc is not None]
        assert bundle.worst_auc == min(defined)
        assert bundle.auc_gap == max(defined) - min(defined)
        assert bundle.worst_auc in defined
        assert bundle.eqodd is not None
        assert bundle.threshold == select_threshold(
            [r.score for r in run.records], [r.label for r in run.records])

    def test_published_two_group_gap(self):
        s0, y0 = scores_with_auc(8807, 100, 100)
        s1, y1 = scores_with_auc(8809, 100, 100)
        run = make_run(s0 + s1, y0 + y1, [0] * len(s0) + [1] * len(s1))
        bundle = evaluate_run(run)
        assert bundle.per_group[0].auc == pytest.approx(0.8807, abs=1e-12)
        assert bundle.worst_auc == pytest.approx(0.8807, abs=1e-12)
        assert bundle.auc_gap == pytest.approx(0.0002, abs=1e-12)

    def test_five_group_worst(self):
        targets = [0.7836, 0.821, 0.85, 0.887, 0.89]
        scores, labels, groups = [], [], []
        for g, t in enumerate(targets):
            s, y = scores_with_auc(int(round(t * 10000)), 100, 100)
            scores += s
            labels += y
            groups += [g] * len(s)
        run = make_run(scores, labels, groups, m=5)
        bundle = evaluate_run(run)
        assert bundle.worst_auc == pytest.approx(0.7836, abs=1e-12)
        assert bundle.auc_gap == pytest.approx(0.89 - 0.7836, abs=1e-12)
        assert bundle.eqodd is None  # not a binary attribute

    def test_single_group_run(self):
        run = make_run([0.9, 0.2, 0.7, 0.4], [1, 0, 1, 0], [0, 0, 0, 0], m=1)
        bundle = evaluate_run(run)
        assert bundle.auc_gap == 0.0
        assert bundle.eqodd is None

    def test_degenerate_group_yields_none_not_failure(self):
        run = make_run([0.9, 0.8, 0.2, 0.3], [1, 1, 0, 0], [0, 1, 0, 0])
        bundle = evaluate_run(run)  # group 1 has only positives
        assert bundle.per_group[1].auc is None
        assert bundle.worst_auc == bundle.per_group[0].auc
        assert bundle.eqodd is None

    def test_pooled_degenerate_raises(self):
        run = make_run([0.9, 0.8], [1, 1], [0, 1])
        with pytest.raises(DegenerateLabels):
            evaluate_run(run)

    def test_threshold_rule_config_respected(self):
        run = make_run([0.9, 0.2, 0.8, 0.3], [1, 0, 1, 0], [0, 0, 1, 1])
        hi = evaluate_run(run, MetricConfig(threshold_rule="min_f1"))
        lo = evaluate_run(run)
        assert hi.threshold == 0.9
        assert lo.threshold == 0.8


class TestAggregateSeeds:
    def _bundle(self, worst):
        run = make_run([0.9, 0.2, 0.8, 0.3], [1, 0, 1, 0], [0, 0, 1, 1])
        b = evaluate_run(run)
        return b.__class__(b.run_id, b.per_group, b.overall_auc, float(worst),
                           b.auc_gap, b.eqodd, b.bce, b.ece, b.threshold)

    def test_textbook_mean_and_std(self):
        stats = aggregate_seeds([self._bundle(v) for v in (1.0, 2.0, 3.0)])
        assert stats["worst_auc"].mean == pytest.approx(2.0, abs=1e-12)
        assert stats["worst_auc"].std == pytest.approx(1.0, abs=1e-12)
        assert stats["worst_auc"].n == 3

    def test_single_bundle_zero_std(self):
        stats = aggregate_seeds([self._bundle(0.7)])
        assert stats["worst_auc"].mean == 0.7
        assert stats["worst_auc"].std == 0.0

    def test_constant_values_zero_std(self):
        stats = aggregate_seeds([self._bundle(85.0) for _ in range(3)])
        assert stats["worst_auc"].mean == 85.0
        assert stats["worst_auc"].std == 0.0

    def test_matches_oracle_std(self):
        values = [0.71, 0.74, 0.68, 0.91]
        stats = aggregate_seeds([self._bundle(v) for v in values])
        assert stats["worst_auc"].std == pytest.approx(oracles.sample_std(values), abs=1e-12)

    def test_mixed_shape_rejected(self):
        two = evaluate_run(make_run([0.9, 0.2, 0.8, 0.3], [1, 0, 1, 0], [0, 0, 1, 1]))
        scores = [0.9, 0.2, 0.8, 0.3, 0.7, 0.1]
        three = evaluate_run(make_run(scores, [1, 0, 1, 0, 1, 0], [0, 0, 1, 1, 2, 2], m=3))
        with pytest.raises(MixedShape):
            aggregate_seeds([two, three])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            aggregate_seeds([])

    def test_scalar_map_covers_csv_columns(self):
        b = evaluate_run(make_run([0.9, 0.2, 0.8, 0.3], [1, 0, 1, 0], [0, 0, 1, 1]))
        keys = set(bundle_scalars(b))
        assert {"overall_auc", "worst_auc", "auc_gap", "eqodd", "bce", "ece",
                "threshold", "auc_g0", "auc_g1", "fpr_g0", "fpr_g1", "fnr_g0",
                "fnr_g1", "tprattnr_g0", "tprattnr_g1"} == keys
