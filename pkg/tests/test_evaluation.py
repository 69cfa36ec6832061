import numpy as np
import pytest

from stancemon.annotation import (
    NEGATIVE,
    OTHER,
    SCHEMES,
    LabeledInstance,
    Reliability,
    TrainVariant,
    aggregate,
)
from stancemon.baselines import load_demo_lexicon
from stancemon.evaluation import (
    Algorithm,
    CvRun,
    PredictionRow,
    _pooled_report,
    binary_prf,
    compute_auc,
    cross_validate,
    curve_to_csv,
    ensemble_predict,
    evaluate_lexicon_baseline,
    evaluate_random_baseline,
    learning_curve,
    make_folds,
    metrics_at_threshold,
    nested_strict_subsets,
    run_cross_validation,
    system_agreement_table,
    threshold_sweep,
)
from stancemon.models import Prediction


def auc_pair_oracle(scored):
    """Exhaustive pairwise comparison: correctly ordered pairs count 1,
    ties count 1/2."""
    positives = [s for s, b in scored if b]
    negatives = [s for s, b in scored if not b]
    total = 0.0
    for p in positives:
        for n in negatives:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(positives) * len(negatives))


def fake_row(tweet_id, gold, label, p_negative):
    scores = {NEGATIVE: p_negative, OTHER: 1 - p_negative}
    return PredictionRow(
        tweet_id=tweet_id,
        gold=gold,
        prediction=Prediction(label=label, scores=scores, pseudo_prob=scores),
    )


class TestMakeFolds:
    def _instances(self, n):
        return [
            LabeledInstance(f"t{i}", f"tekst {i}", NEGATIVE, Reliability.STRICT)
            for i in range(n)
        ]

    def test_even_split(self):
        plan = make_folds(self._instances(100), k=10, seed=1)
        sizes = np.bincount(list(plan.assignments.values()), minlength=10)
        assert sizes.tolist() == [10] * 10

    def test_uneven_split(self):
        plan = make_folds(self._instances(101), k=10, seed=1)
        sizes = sorted(np.bincount(list(plan.assignments.values()), minlength=10).tolist())
        assert sizes == [10] * 9 + [11]

    def test_deterministic(self):
        instances = self._instances(57)
        assert make_folds(instances, 10, seed=3).assignments == make_folds(
            instances, 10, seed=3
        ).assignments

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            make_folds(self._instances(5), k=10, seed=0)


class TestComputeAuc:
    def test_perfect_ranking(self):
        scored = [(0.9, True), (0.8, True), (0.2, False), (0.1, False)]
        assert compute_auc(scored) == 1.0

    def test_all_ties(self):
        scored = [(0.5, True), (0.5, False), (0.5, True), (0.5, False)]
        assert compute_auc(scored) == 0.5

    def test_six_item_mixed_vs_oracle(self):
        scored = [(0.9, True), (0.7, False), (0.7, True), (0.4, False), (0.2, True), (0.1, False)]
        assert compute_auc(scored) == pytest.approx(auc_pair_oracle(scored), abs=1e-12)

    def test_random_sets_vs_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(2, 80))
            scored = [
                (float(rng.integers(0, 10)) / 10, bool(rng.random() < 0.4))
                for _ in range(n)
            ]
            flags = {b for _, b in scored}
            if len(flags) < 2:
                with pytest.raises(ValueError):
                    compute_auc(scored)
                continue
            assert compute_auc(scored) == pytest.approx(auc_pair_oracle(scored), abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            compute_auc([(0.5, True), (0.2, True)])


class TestBinaryPrf:
    def test_identities(self):
        precision, recall, f1 = binary_prf([True, True, False], [True, False, True])
        assert precision == 0.5
        assert recall == 0.5
        assert f1 == 0.5

    def test_zero_cases(self):
        assert binary_prf([True], [False]) == (0.0, 0.0, 0.0)
        assert binary_prf([False], [False]) == (0.0, 0.0, 0.0)


class TestCrossValidation:
    def test_folds_partition_strict_and_exclude_tiers(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        strict_ids = {inst.tweet_id for inst in small_polarity_dataset.strict}
        assert set(plan.assignments) == strict_ids
        other_ids = {
            inst.tweet_id
            for tier in (small_polarity_dataset.lax, small_polarity_dataset.one)
            for inst in tier
        }
        assert not (set(plan.assignments) & other_ids)
        run = run_cross_validation(
            small_polarity_dataset, TrainVariant.STRICT_LAX, Algorithm.MNB, plan
        )
        assert {row.tweet_id for row in run.rows} == strict_ids
        assert run.report.n_test == len(strict_ids)

    def test_all_negative_classifier_metric_identities(self):
        rows = [
            fake_row(f"t{i}", NEGATIVE if i < 3 else OTHER, NEGATIVE, 0.9)
            for i in range(10)
        ]
        report = _pooled_report(rows, (NEGATIVE, OTHER))
        assert report.recall == 1.0
        assert report.precision == pytest.approx(0.3)

    def test_confusion_rows_sum_to_gold_counts(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        report = cross_validate(
            small_polarity_dataset, TrainVariant.STRICT, None, Algorithm.MNB, plan
        )
        for gold in report.labels:
            row_sum = sum(report.confusion[gold].values())
            expected = sum(
                1 for inst in small_polarity_dataset.strict if inst.label == gold
            )
            assert row_sum == expected
        total = sum(sum(row.values()) for row in report.confusion.values())
        assert total == len(small_polarity_dataset.strict)

    def test_scheme_mismatch_rejected(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        with pytest.raises(ValueError, match="scheme mismatch"):
            cross_validate(
                small_polarity_dataset, TrainVariant.STRICT,
                SCHEMES["binary"], Algorithm.MNB, plan,
            )

    def test_reproducible(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        a = cross_validate(
            small_polarity_dataset, TrainVariant.STRICT, None, Algorithm.SVM, plan
        )
        b = cross_validate(
            small_polarity_dataset, TrainVariant.STRICT, None, Algorithm.SVM, plan
        )
        assert a == b


class TestThresholdSweep:
    def test_below_min_flags_everything(self):
        scored = [(0.9, True), (0.5, False), (0.1, False), (0.7, True)]
        point = metrics_at_threshold(scored, -1.0)
        assert point.recall == 1.0
        assert point.precision == pytest.approx(0.5)

    def test_above_max_flags_nothing(self):
        scored = [(0.9, True), (0.5, False)]
        point = metrics_at_threshold(scored, 2.0)
        assert point.recall == 0.0

    def test_recall_monotone_as_threshold_decreases(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            scored = [
                (float(rng.random()), bool(rng.random() < 0.3))
                for _ in range(int(rng.integers(2, 60)))
            ]
            if not any(b for _, b in scored):
                continue
            points = threshold_sweep(scored)
            assert all(
                earlier.recall <= later.recall + 1e-12
                for earlier, later in zip(points, points[1:])
            )
            assert [p.x for p in points] == sorted({s for s, _ in scored}, reverse=True)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            threshold_sweep([])


class TestLearningCurve:
    def test_full_fraction_equals_cross_validation(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        points = learning_curve(
            small_polarity_dataset, TrainVariant.STRICT_LAX, Algorithm.MNB, plan, steps=2
        )
        report = cross_validate(
            small_polarity_dataset, TrainVariant.STRICT_LAX, None, Algorithm.MNB, plan
        )
        last = points[-1]
        assert last.x == 1.0
        assert (last.precision, last.recall, last.f1, last.auc) == (
            report.precision, report.recall, report.f1, report.auc,
        )

    def test_subsets_are_nested(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        smaller = nested_strict_subsets(small_polarity_dataset, plan, 0.1)
        larger = nested_strict_subsets(small_polarity_dataset, plan, 0.2)
        for fold in smaller:
            assert smaller[fold] <= larger[fold]
            assert len(smaller[fold]) >= 1

    def test_csv_rendering(self):
        points = [
            metrics_at_threshold([(0.9, True), (0.1, False)], t) for t in (0.9, 0.1)
        ]
        text = curve_to_csv(points)
        lines = text.strip().split("\n")
        assert lines[0] == "x,precision,recall,f1"
        assert len(lines) == 3


class TestEnsemble:
    def test_or_rule(self):
        assert ensemble_predict(NEGATIVE, OTHER) == NEGATIVE
        assert ensemble_predict(OTHER, OTHER) == OTHER
        assert ensemble_predict(NEGATIVE, NEGATIVE) == NEGATIVE
        assert ensemble_predict(OTHER, "Neutral") == OTHER

    def test_predicted_set_is_superset_hence_recall(self):
        rng = np.random.default_rng(31)
        ml = [NEGATIVE if rng.random() < 0.3 else OTHER for _ in range(300)]
        rule = [NEGATIVE if rng.random() < 0.4 else "Neutral" for _ in range(300)]
        gold = [rng.random() < 0.2 for _ in range(300)]
        combined = [ensemble_predict(a, b) for a, b in zip(ml, rule)]
        ml_set = {i for i, label in enumerate(ml) if label == NEGATIVE}
        rule_set = {i for i, label in enumerate(rule) if label == NEGATIVE}
        ens_set = {i for i, label in enumerate(combined) if label == NEGATIVE}
        assert ml_set <= ens_set and rule_set <= ens_set
        def recall(flagged):
            covered = sum(1 for i, g in enumerate(gold) if g and i in flagged)
            return covered / sum(gold)
        assert recall(ens_set) >= recall(ml_set)
        assert recall(ens_set) >= recall(rule_set)


class TestSystemAgreementTable:
    def test_identical_predictions(self):
        table = system_agreement_table([NEGATIVE, OTHER], [NEGATIVE, OTHER])
        assert table.other_negative == table.negative_other == 0

    def test_disjoint_negative_sets(self):
        table = system_agreement_table([NEGATIVE, OTHER], [OTHER, NEGATIVE])
        assert table.negative_negative == 0

    def test_cells_sum(self):
        rng = np.random.default_rng(41)
        a = [NEGATIVE if rng.random() < 0.5 else OTHER for _ in range(77)]
        b = [NEGATIVE if rng.random() < 0.5 else OTHER for _ in range(77)]
        assert system_agreement_table(a, b).total == 77

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            system_agreement_table([NEGATIVE], [])


class TestBaselineEvaluators:
    def test_lexicon_baseline_reports(self, small_polarity_dataset):
        plan = make_folds(small_polarity_dataset.strict, k=5, seed=2)
        run = evaluate_lexicon_baseline(
            small_polarity_dataset, load_demo_lexicon(), plan
        )
        assert len(run.labels) == len(small_polarity_dataset.strict)
        assert 0.0 <= run.report.f1 <= 1.0
        assert run.report.auc > 0.5  # the demo lexicon carries real signal

    def test_random_baseline_recall_tracks_p(self, small_polarity_dataset):
        run = evaluate_random_baseline(small_polarity_dataset, 1.0, seed=3)
        assert run.report.recall == 1.0
        run0 = evaluate_random_baseline(small_polarity_dataset, 0.0, seed=3)
        assert run0.report.recall == 0.0
