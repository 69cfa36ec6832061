"""Cross-validation harness and the metrics behind the result tables.

Folds are built over the strictly labeled data only; lax/one tiers are
training-time additions.  Metrics pool the per-fold predictions (micro
pooling) and binarize multiclass output to Negative-vs-rest for
precision/recall/F1/AUC.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import baselines
from .annotation import (
    NEGATIVE,
    OTHER,
    LabeledDataset,
    LabeledInstance,
    LabelingScheme,
    Reliability,
    TrainVariant,
    compose_training,
)
from .baselines import PolarityLexicon, lexicon_classify, lexicon_score, tune_threshold
from .features import DEFAULT_VOCABULARY_SIZE, Token, build_vocabulary, tokenize, vectorize
from .models import (
    DEFAULT_MNB_ALPHA,
    DEFAULT_SVM_C,
    Prediction,
    predict,
    train_mnb,
    train_svm,
)

logger = logging.getLogger(__name__)


class Algorithm(Enum):
    MNB = "mnb"
    SVM = "svm"


@dataclass(frozen=True)
class TrainSettings:
    """Classifier hyperparameters; the defaults are the reference setup."""

    vocabulary_size: int = DEFAULT_VOCABULARY_SIZE
    mnb_alpha: float = DEFAULT_MNB_ALPHA
    mnb_fit_prior: bool = False
    svm_c: float = DEFAULT_SVM_C


DEFAULT_SETTINGS = TrainSettings()


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of strict instances to k folds of near-equal size."""

    k: int
    assignments: dict[str, int]
    seed: int


@dataclass(frozen=True)
class EvalReport:
    """Negative-class metrics plus the full gold-by-predicted confusion."""

    precision: float
    recall: float
    f1: float
    auc: float
    confusion: dict[str, dict[str, int]]
    n_test: int
    labels: tuple[str, ...]


@dataclass(frozen=True)
class CurvePoint:
    x: float
    precision: float
    recall: float
    f1: float
    auc: float


@dataclass(frozen=True)
class PredictionRow:
    tweet_id: str
    gold: str
    prediction: Prediction


@dataclass(frozen=True)
class CvRun:
    """Pooled per-instance predictions of one cross-validation run."""

    rows: tuple[PredictionRow, ...]
    report: EvalReport


@dataclass(frozen=True)
class BaselineRun:
    """Per-instance labels and ranking scores of a baseline over strict data."""

    labels: tuple[str, ...]
    negative_scores: tuple[float, ...]
    report: EvalReport


@dataclass(frozen=True)
class SystemAgreementTable:
    """2x2 Negative/Other counts between two systems' predictions."""

    other_other: int
    other_negative: int
    negative_other: int
    negative_negative: int

    @property
    def total(self) -> int:
        return (
            self.other_other
            + self.other_negative
            + self.negative_other
            + self.negative_negative
        )


def make_folds(
    strict: Sequence[LabeledInstance], k: int = 10, seed: int = 42
) -> FoldPlan:
    """Seeded shuffle, then round-robin assignment; sizes differ by <= 1."""
    if k > len(strict):
        raise ValueError(f"cannot split {len(strict)} instances into {k} folds")
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(strict))
    assignments = {strict[j].tweet_id: int(i % k) for i, j in enumerate(order)}
    return FoldPlan(k=k, assignments=assignments, seed=seed)


# ---------------------------------------------------------------------------
# Metrics


def binary_prf(
    gold: Sequence[bool], predicted: Sequence[bool]
) -> tuple[float, float, float]:
    """Precision, recall, F1 for the flagged class; 0 when undefined."""
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted must have equal length")
    tp = sum(1 for g, p in zip(gold, predicted) if g and p)
    fp = sum(1 for g, p in zip(gold, predicted) if not g and p)
    fn = sum(1 for g, p in zip(gold, predicted) if g and not p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return precision, recall, f1


def compute_auc(scored: Sequence[tuple[float, bool]]) -> float:
    """Rank-based (Mann-Whitney) AUC with average ranks for ties."""
    flags = np.array([bool(b) for _, b in scored])
    n_pos = int(flags.sum())
    n_neg = len(flags) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one instance of each class")
    scores = np.array([float(s) for s, _ in scored])
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        # 1-based ranks; tied scores share the average rank of their block.
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = float(ranks[flags].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _pooled_report(
    rows: Sequence[PredictionRow], labels: Sequence[str]
) -> EvalReport:
    gold_negative = [row.gold == NEGATIVE for row in rows]
    predicted_negative = [row.prediction.label == NEGATIVE for row in rows]
    precision, recall, f1 = binary_prf(gold_negative, predicted_negative)
    scored = [
        (row.prediction.negative_score(NEGATIVE), row.gold == NEGATIVE) for row in rows
    ]
    auc = compute_auc(scored) if 0 < sum(gold_negative) < len(rows) else 0.5
    confusion = {g: {p: 0 for p in labels} for g in labels}
    for row in rows:
        confusion[row.gold][row.prediction.label] += 1
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc,
        confusion=confusion,
        n_test=len(rows),
        labels=tuple(labels),
    )


# ---------------------------------------------------------------------------
# Cross-validation


def train_from_instances(
    training: Sequence[LabeledInstance],
    scheme: LabelingScheme,
    algorithm: Algorithm,
    settings: TrainSettings = DEFAULT_SETTINGS,
    seed_key: Sequence[int] = (0,),
    token_cache: dict[str, list[Token]] | None = None,
):
    """Build a vocabulary from the training instances and fit a model.

    Classes follow the scheme's priority order, restricted to the
    categories present in the training data.  Returns (model, vocabulary).
    """
    if token_cache is None:
        token_cache = {}
        for inst in training:
            if inst.tweet_id not in token_cache:
                token_cache[inst.tweet_id] = tokenize(inst.text)
    vocabulary = build_vocabulary(
        (token_cache[inst.tweet_id] for inst in training),
        max_size=settings.vocabulary_size,
    )
    present = {inst.label for inst in training}
    classes = [c for c in scheme.categories if c in present]
    data = [
        (vectorize(token_cache[inst.tweet_id], vocabulary), inst.label)
        for inst in training
    ]
    if algorithm is Algorithm.MNB:
        model = train_mnb(
            data,
            len(vocabulary),
            alpha=settings.mnb_alpha,
            fit_prior=settings.mnb_fit_prior,
            classes=classes,
        )
    elif algorithm is Algorithm.SVM:
        model = train_svm(
            data, len(vocabulary), C=settings.svm_c, seed=tuple(seed_key), classes=classes
        )
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return model, vocabulary


def _check_grid_cell(
    dataset: LabeledDataset,
    variant: TrainVariant,
    algorithm: Algorithm,
    plan: FoldPlan,
    scheme: LabelingScheme | None,
) -> None:
    if scheme is not None and scheme.name != dataset.scheme.name:
        raise ValueError(
            f"scheme mismatch: dataset is {dataset.scheme.name!r}, requested {scheme.name!r}"
        )
    strict_ids = {inst.tweet_id for inst in dataset.strict}
    if strict_ids != set(plan.assignments):
        raise ValueError("fold plan does not cover the strict instances exactly")
    for tier in variant.tiers:
        if tier is not Reliability.STRICT and not dataset.tier(tier):
            logger.warning(
                "variant %s requests the empty %s tier of scheme %s",
                variant.value, tier.value, dataset.scheme.name,
            )


def _fold_training_subset(
    dataset: LabeledDataset,
    variant: TrainVariant,
    plan: FoldPlan,
    fold: int,
    keep_ids: set[str] | None = None,
) -> list[LabeledInstance]:
    """Training instances for one fold, in canonical dataset order."""
    training = [
        inst
        for inst in dataset.strict
        if plan.assignments[inst.tweet_id] != fold
        and (keep_ids is None or inst.tweet_id in keep_ids)
    ]
    for tier in variant.tiers:
        if tier is not Reliability.STRICT:
            training.extend(dataset.tier(tier))
    return training


def _token_cache(dataset: LabeledDataset) -> dict[str, list[Token]]:
    cache: dict[str, list[Token]] = {}
    for tier in (dataset.strict, dataset.lax, dataset.one):
        for inst in tier:
            if inst.tweet_id not in cache:
                cache[inst.tweet_id] = tokenize(inst.text)
    return cache


def run_cross_validation(
    dataset: LabeledDataset,
    variant: TrainVariant,
    algorithm: Algorithm,
    plan: FoldPlan,
    scheme: LabelingScheme | None = None,
    settings: TrainSettings = DEFAULT_SETTINGS,
    strict_subsets: dict[int, set[str]] | None = None,
) -> CvRun:
    """Train per fold, predict its strict test fold, pool the predictions.

    The vocabulary is rebuilt from each fold's training set only.
    ``strict_subsets`` optionally restricts the strict training portion per
    fold (used by learning curves); test folds are never restricted.
    """
    _check_grid_cell(dataset, variant, algorithm, plan, scheme)
    tokens = _token_cache(dataset)
    predictions: dict[str, PredictionRow] = {}
    for fold in range(plan.k):
        keep = strict_subsets.get(fold) if strict_subsets else None
        training = _fold_training_subset(dataset, variant, plan, fold, keep)
        model, vocabulary = train_from_instances(
            training, dataset.scheme, algorithm, settings,
            seed_key=(plan.seed, fold), token_cache=tokens,
        )
        for inst in dataset.strict:
            if plan.assignments[inst.tweet_id] != fold:
                continue
            vec = vectorize(tokens[inst.tweet_id], vocabulary)
            predictions[inst.tweet_id] = PredictionRow(
                tweet_id=inst.tweet_id,
                gold=inst.label,
                prediction=predict(model, vec),
            )
    rows = tuple(predictions[inst.tweet_id] for inst in dataset.strict)
    return CvRun(rows=rows, report=_pooled_report(rows, dataset.scheme.categories))


def cross_validate(
    dataset: LabeledDataset,
    variant: TrainVariant,
    scheme: LabelingScheme | None,
    algorithm: Algorithm,
    plan: FoldPlan,
    settings: TrainSettings = DEFAULT_SETTINGS,
) -> EvalReport:
    return run_cross_validation(
        dataset, variant, algorithm, plan, scheme=scheme, settings=settings
    ).report


def metrics_at_threshold(
    predictions: Sequence[tuple[float, bool]], threshold: float, auc: float = 0.5
) -> CurvePoint:
    """Metrics of predicting Negative when score >= threshold."""
    gold = [b for _, b in predictions]
    flagged = [score >= threshold for score, _ in predictions]
    precision, recall, f1 = binary_prf(gold, flagged)
    return CurvePoint(x=threshold, precision=precision, recall=recall, f1=f1, auc=auc)


def threshold_sweep(
    predictions: Sequence[tuple[float, bool]]
) -> list[CurvePoint]:
    """One curve point per distinct score, thresholds descending.

    A point's metrics cover predicting Negative when score >= threshold,
    so recall never decreases along the returned list.  Every point carries
    the global ranking AUC of the scores.
    """
    if not predictions:
        raise ValueError("threshold_sweep requires at least one prediction")
    gold = [b for _, b in predictions]
    has_both = 0 < sum(gold) < len(gold)
    auc = compute_auc(predictions) if has_both else 0.5
    return [
        metrics_at_threshold(predictions, threshold, auc)
        for threshold in sorted({s for s, _ in predictions}, reverse=True)
    ]


def nested_strict_subsets(
    dataset: LabeledDataset, plan: FoldPlan, fraction: float
) -> dict[int, set[str]]:
    """Per-fold seeded sample of the strict training ids at a fraction.

    The per-fold shuffle is fixed by (plan.seed, fold), so a smaller
    fraction's subset is always contained in a larger fraction's.
    """
    subsets: dict[int, set[str]] = {}
    for fold in range(plan.k):
        ids = [
            inst.tweet_id
            for inst in dataset.strict
            if plan.assignments[inst.tweet_id] != fold
        ]
        rng = np.random.default_rng([plan.seed, fold])
        order = [ids[i] for i in rng.permutation(len(ids))]
        subsets[fold] = set(order[: math.ceil(fraction * len(order))])
    return subsets


def learning_curve(
    dataset: LabeledDataset,
    variant: TrainVariant,
    algorithm: Algorithm,
    plan: FoldPlan,
    steps: int = 10,
    settings: TrainSettings = DEFAULT_SETTINGS,
) -> list[CurvePoint]:
    """Metrics at nested 1/steps .. steps/steps fractions of the strict
    training portion; full lax/one tiers are always included.

    At fraction 1.0 the run is identical to plain cross-validation.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    points = []
    for step in range(1, steps + 1):
        fraction = step / steps
        run = run_cross_validation(
            dataset, variant, algorithm, plan,
            settings=settings,
            strict_subsets=nested_strict_subsets(dataset, plan, fraction),
        )
        report = run.report
        points.append(
            CurvePoint(
                x=fraction,
                precision=report.precision,
                recall=report.recall,
                f1=report.f1,
                auc=report.auc,
            )
        )
    return points


# ---------------------------------------------------------------------------
# Ensemble and system comparison


def ensemble_predict(ml_label: str, rule_label: str) -> str:
    """Negative when either system says Negative, else Other."""
    if ml_label == NEGATIVE or rule_label == NEGATIVE:
        return NEGATIVE
    return OTHER


def system_agreement_table(
    predictions_a: Sequence[str], predictions_b: Sequence[str]
) -> SystemAgreementTable:
    if len(predictions_a) != len(predictions_b):
        raise ValueError("prediction lists must have equal length")
    cells = {(False, False): 0, (False, True): 0, (True, False): 0, (True, True): 0}
    for a, b in zip(predictions_a, predictions_b):
        cells[(a == NEGATIVE, b == NEGATIVE)] += 1
    return SystemAgreementTable(
        other_other=cells[(False, False)],
        other_negative=cells[(False, True)],
        negative_other=cells[(True, False)],
        negative_negative=cells[(True, True)],
    )


# ---------------------------------------------------------------------------
# Baselines over the CV protocol


def evaluate_lexicon_baseline(
    dataset: LabeledDataset,
    lexicon: PolarityLexicon,
    plan: FoldPlan,
    variant: TrainVariant = TrainVariant.STRICT,
) -> BaselineRun:
    """Score strict folds with the lexicon, tuning the Negative threshold
    on each fold's training portion.  Ranking scores negate the polarity
    (more negative polarity = more likely Negative)."""
    tokens = _token_cache(dataset)
    scores = {
        tweet_id: lexicon_score(toks, lexicon) for tweet_id, toks in tokens.items()
    }
    labels: dict[str, str] = {}
    for fold in range(plan.k):
        training = _fold_training_subset(dataset, variant, plan, fold)
        rule = tune_threshold(
            [(scores[inst.tweet_id], inst.label == NEGATIVE) for inst in training]
        )
        for inst in dataset.strict:
            if plan.assignments[inst.tweet_id] == fold:
                labels[inst.tweet_id] = lexicon_classify(scores[inst.tweet_id], rule)
    ordered_labels = tuple(labels[inst.tweet_id] for inst in dataset.strict)
    negative_scores = tuple(-scores[inst.tweet_id] for inst in dataset.strict)
    report = _binary_baseline_report(dataset, ordered_labels, negative_scores)
    return BaselineRun(
        labels=ordered_labels, negative_scores=negative_scores, report=report
    )


def evaluate_random_baseline(
    dataset: LabeledDataset, p: float, seed: int
) -> BaselineRun:
    """Flag each strict instance as Negative with probability p."""
    flags = baselines.random_baseline(len(dataset.strict), p, seed)
    labels = tuple(NEGATIVE if flag else OTHER for flag in flags)
    negative_scores = tuple(1.0 if flag else 0.0 for flag in flags)
    report = _binary_baseline_report(dataset, labels, negative_scores)
    return BaselineRun(labels=labels, negative_scores=negative_scores, report=report)


def _binary_baseline_report(
    dataset: LabeledDataset,
    labels: Sequence[str],
    negative_scores: Sequence[float],
) -> EvalReport:
    gold = [inst.label == NEGATIVE for inst in dataset.strict]
    predicted = [label == NEGATIVE for label in labels]
    precision, recall, f1 = binary_prf(gold, predicted)
    scored = list(zip(negative_scores, gold))
    auc = compute_auc(scored) if 0 < sum(gold) < len(gold) else 0.5
    confusion = {g: {p: 0 for p in (NEGATIVE, OTHER)} for g in (NEGATIVE, OTHER)}
    for g, p in zip(gold, predicted):
        confusion[NEGATIVE if g else OTHER][NEGATIVE if p else OTHER] += 1
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc,
        confusion=confusion,
        n_test=len(labels),
        labels=(NEGATIVE, OTHER),
    )


# ---------------------------------------------------------------------------
# Report rendering


def report_to_dict(report: EvalReport) -> dict:
    return {
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "auc": report.auc,
        "n_test": report.n_test,
        "labels": list(report.labels),
        "confusion": report.confusion,
    }


def render_report_table(report: EvalReport, title: str = "") -> str:
    """Aligned-column text rendering: headline metrics plus the confusion
    table (gold in rows, predictions in columns)."""
    out = io.StringIO()
    if title:
        out.write(title + "\n")
    out.write(
        f"precision {report.precision:.3f}  recall {report.recall:.3f}  "
        f"f1 {report.f1:.3f}  auc {report.auc:.3f}  n {report.n_test}\n"
    )
    labels = report.labels
    width = max(len(label) for label in labels) + 2
    cell = max(width, 7)
    out.write(" " * width + "".join(f"{label:>{cell}}" for label in labels) + "\n")
    for gold in labels:
        row = report.confusion[gold]
        out.write(
            f"{gold:<{width}}" + "".join(f"{row[p]:>{cell}}" for p in labels) + "\n"
        )
    return out.getvalue()


def render_agreement_table(table: SystemAgreementTable, name_a: str, name_b: str) -> str:
    out = io.StringIO()
    width = max(len(name_a), len(name_b), 8) + 2
    out.write(f"{'':{width}}{'B-Other':>10}{'B-Negative':>12}   (B = {name_b})\n")
    out.write(f"{'A-Other':<{width}}{table.other_other:>10}{table.other_negative:>12}\n")
    out.write(
        f"{'A-Negative':<{width}}{table.negative_other:>10}{table.negative_negative:>12}"
        f"   (A = {name_a})\n"
    )
    return out.getvalue()


def curve_to_csv(points: Sequence[CurvePoint]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "precision", "recall", "f1"])
    for point in points:
        writer.writerow(
            [repr(point.x), repr(point.precision), repr(point.recall), repr(point.f1)]
        )
    return out.getvalue()


def reports_to_json(cells: dict[str, EvalReport]) -> str:
    payload = {name: report_to_dict(report) for name, report in cells.items()}
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"
