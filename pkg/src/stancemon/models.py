"""Multinomial Naive Bayes and linear SVM classifiers over binary features.

Both are trained from scratch.  The SVM solves the L2-regularized
hinge-loss problem one-vs-rest per class with dual coordinate descent;
class imbalance is compensated with balanced per-instance penalties.  The
bias term is learned by augmenting every instance with a constant feature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .errors import ModelArtifactError
from .features import FeatureVector, Vocabulary

MNB_KIND = "mnb"
SVM_KIND = "svm"

DEFAULT_MNB_ALPHA = 0.0
DEFAULT_SVM_C = 1.0
PROBABILITY_FLOOR = 1e-10

_SVM_TOLERANCE = 1e-3
_SVM_MAX_EPOCHS = 1000


@dataclass(frozen=True)
class MnbModel:
    classes: tuple[str, ...]
    log_prior: np.ndarray
    log_likelihood: np.ndarray
    smoothing_alpha: float = DEFAULT_MNB_ALPHA
    floor: float = PROBABILITY_FLOOR

    @property
    def n_features(self) -> int:
        return self.log_likelihood.shape[1]


@dataclass(frozen=True)
class SvmModel:
    classes: tuple[str, ...]
    weights: np.ndarray
    bias: np.ndarray
    C: float = DEFAULT_SVM_C

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class Prediction:
    """Per-class raw scores plus softmax pseudo-probabilities."""

    label: str
    scores: dict[str, float]
    pseudo_prob: dict[str, float]

    def negative_score(self, negative_label: str = "Negative") -> float:
        return self.pseudo_prob.get(negative_label, 0.0)


def _resolve_classes(
    labels: Sequence[str], classes: Sequence[str] | None
) -> tuple[str, ...]:
    present = set(labels)
    if classes is None:
        return tuple(sorted(present))
    classes = tuple(classes)
    empty = [c for c in classes if c not in present]
    if empty:
        raise ValueError(f"classes with zero training instances: {empty}")
    unknown = present - set(classes)
    if unknown:
        raise ValueError(f"training labels outside the class list: {sorted(unknown)}")
    return classes


def _to_csr(vectors: Sequence[FeatureVector], n_features: int) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, vec in enumerate(vectors):
        if vec.indices and vec.indices[-1] >= n_features:
            raise ValueError(
                f"feature index {vec.indices[-1]} out of range for {n_features} features"
            )
        indptr[i + 1] = indptr[i] + len(vec.indices)
    indices = np.empty(indptr[-1], dtype=np.int64)
    for i, vec in enumerate(vectors):
        indices[indptr[i] : indptr[i + 1]] = vec.indices
    return indptr, indices


# ---------------------------------------------------------------------------
# Multinomial Naive Bayes


def train_mnb(
    data: Sequence[tuple[FeatureVector, str]],
    n_features: int,
    alpha: float = DEFAULT_MNB_ALPHA,
    fit_prior: bool = False,
    classes: Sequence[str] | None = None,
) -> MnbModel:
    """Estimate per-class feature probabilities by counting.

    P(t|c) = (count(t,c) + alpha) / (total(c) + alpha * V).  Zero
    probabilities are floored before taking logs so that alpha = 0 (the
    default) never produces infinities.  With fit_prior False the prior is
    uniform.
    """
    if not data:
        raise ValueError("training data must be non-empty")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    labels = [label for _, label in data]
    class_list = _resolve_classes(labels, classes)
    class_index = {c: k for k, c in enumerate(class_list)}
    n_classes = len(class_list)

    counts = np.zeros((n_classes, n_features), dtype=np.float64)
    class_sizes = np.zeros(n_classes, dtype=np.float64)
    for vec, label in data:
        k = class_index[label]
        class_sizes[k] += 1
        if vec.indices:
            if vec.indices[-1] >= n_features:
                raise ValueError(
                    f"feature index {vec.indices[-1]} out of range for {n_features} features"
                )
            counts[k, list(vec.indices)] += 1.0

    totals = counts.sum(axis=1)
    probabilities = np.zeros_like(counts)
    for k in range(n_classes):
        denominator = totals[k] + alpha * n_features
        if denominator > 0:
            probabilities[k] = (counts[k] + alpha) / denominator
    probabilities[probabilities <= 0.0] = PROBABILITY_FLOOR

    if fit_prior:
        log_prior = np.log(class_sizes / class_sizes.sum())
    else:
        log_prior = np.full(n_classes, -math.log(n_classes))
    return MnbModel(
        classes=class_list,
        log_prior=log_prior,
        log_likelihood=np.log(probabilities),
        smoothing_alpha=alpha,
    )


# ---------------------------------------------------------------------------
# Linear SVM via dual coordinate descent


@njit(cache=True)
def _dual_cd_epoch(indptr, indices, y, upper, qdiag, alpha, w, order):
    """One pass of dual coordinate descent; mutates alpha and w in place.

    The last entry of w is the bias learned through the implicit constant
    feature.  Returns the maximal projected-gradient violation seen.
    """
    bias_slot = w.shape[0] - 1
    max_violation = 0.0
    for t in range(order.shape[0]):
        i = order[t]
        start = indptr[i]
        end = indptr[i + 1]
        margin = w[bias_slot]
        for p in range(start, end):
            margin += w[indices[p]]
        gradient = y[i] * margin - 1.0

        projected = gradient
        if alpha[i] <= 0.0:
            projected = gradient if gradient < 0.0 else 0.0
        elif alpha[i] >= upper[i]:
            projected = gradient if gradient > 0.0 else 0.0
        if projected > max_violation:
            max_violation = projected
        elif -projected > max_violation:
            max_violation = -projected

        if projected != 0.0:
            updated = alpha[i] - gradient / qdiag[i]
            if updated < 0.0:
                updated = 0.0
            elif updated > upper[i]:
                updated = upper[i]
            delta = (updated - alpha[i]) * y[i]
            if delta != 0.0:
                alpha[i] = updated
                for p in range(start, end):
                    w[indices[p]] += delta
                w[bias_slot] += delta
    return max_violation


@dataclass(frozen=True)
class BinarySvmFit:
    """Solution of one class-vs-rest subproblem, kept for inspection."""

    weights: np.ndarray
    bias: float
    alpha: np.ndarray
    upper: np.ndarray
    dual_objectives: tuple[float, ...]
    converged: bool


def solve_binary_svm(
    indptr: np.ndarray,
    indices: np.ndarray,
    y: np.ndarray,
    upper: np.ndarray,
    n_features: int,
    seed_key: Sequence[int],
    tolerance: float = _SVM_TOLERANCE,
    max_epochs: int = _SVM_MAX_EPOCHS,
) -> BinarySvmFit:
    """Solve min_a 0.5 aQa - sum(a) s.t. 0 <= a_i <= upper_i.

    The instance order is reshuffled every epoch with a generator seeded
    from ``seed_key``, making training bit-reproducible.
    """
    n = y.shape[0]
    # Binary feature values are all 1, so Q_ii is nnz plus the bias feature.
    qdiag = (indptr[1:] - indptr[:-1]).astype(np.float64) + 1.0
    alpha = np.zeros(n, dtype=np.float64)
    w = np.zeros(n_features + 1, dtype=np.float64)
    rng = np.random.default_rng(list(seed_key))
    objectives: list[float] = []
    converged = False
    for _ in range(max_epochs):
        order = rng.permutation(n)
        violation = _dual_cd_epoch(indptr, indices, y, upper, qdiag, alpha, w, order)
        objectives.append(0.5 * float(w @ w) - float(alpha.sum()))
        if violation < tolerance:
            converged = True
            break
    return BinarySvmFit(
        weights=w[:-1].copy(),
        bias=float(w[-1]),
        alpha=alpha,
        upper=upper,
        dual_objectives=tuple(objectives),
        converged=converged,
    )


def balanced_binary_penalties(y: np.ndarray, C: float) -> np.ndarray:
    """Per-instance upper bounds C_i = C * n / (2 * n_class) on the
    binarized labels, compensating positive/negative imbalance."""
    n = y.shape[0]
    n_pos = int((y > 0).sum())
    n_neg = n - n_pos
    weight_pos = n / (2.0 * n_pos)
    weight_neg = n / (2.0 * n_neg)
    return np.where(y > 0, C * weight_pos, C * weight_neg)


def train_svm(
    data: Sequence[tuple[FeatureVector, str]],
    n_features: int,
    C: float = DEFAULT_SVM_C,
    seed: int | Sequence[int] = 0,
    classes: Sequence[str] | None = None,
    tolerance: float = _SVM_TOLERANCE,
    max_epochs: int = _SVM_MAX_EPOCHS,
) -> SvmModel:
    """Train one-vs-rest linear separators with balanced class weights."""
    if not data:
        raise ValueError("training data must be non-empty")
    if C <= 0:
        raise ValueError("C must be positive")
    labels = [label for _, label in data]
    class_list = _resolve_classes(labels, classes)
    if len(class_list) < 2:
        raise ValueError("SVM training requires at least two classes")

    seed_base = (seed,) if isinstance(seed, int) else tuple(seed)
    label_array = np.asarray(labels)
    indptr, indices = _to_csr([vec for vec, _ in data], n_features)
    weights = np.zeros((len(class_list), n_features), dtype=np.float64)
    bias = np.zeros(len(class_list), dtype=np.float64)
    for k, category in enumerate(class_list):
        y = np.where(label_array == category, 1.0, -1.0)
        upper = balanced_binary_penalties(y, C)
        fit = solve_binary_svm(
            indptr, indices, y, upper, n_features,
            seed_key=(*seed_base, k), tolerance=tolerance, max_epochs=max_epochs,
        )
        weights[k] = fit.weights
        bias[k] = fit.bias
    return SvmModel(classes=class_list, weights=weights, bias=bias, C=C)


# ---------------------------------------------------------------------------
# Prediction


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = np.exp(scores - scores.max())
    return shifted / shifted.sum()


def predict(model: MnbModel | SvmModel, vec: FeatureVector) -> Prediction:
    """Score a feature vector with either model kind.

    MNB scores are log-posteriors, SVM scores are decision values; the
    pseudo-probabilities are the softmax of the scores in both cases.
    Ties in the argmax resolve to the earlier class.
    """
    if vec.indices and vec.indices[-1] >= model.n_features:
        raise ValueError(
            f"feature index {vec.indices[-1]} out of range for {model.n_features} features"
        )
    idx = list(vec.indices)
    if isinstance(model, MnbModel):
        scores = model.log_prior + model.log_likelihood[:, idx].sum(axis=1)
    elif isinstance(model, SvmModel):
        scores = model.weights[:, idx].sum(axis=1) + model.bias
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    probabilities = _softmax(scores)
    best = int(np.argmax(scores))
    return Prediction(
        label=model.classes[best],
        scores={c: float(s) for c, s in zip(model.classes, scores)},
        pseudo_prob={c: float(p) for c, p in zip(model.classes, probabilities)},
    )


# ---------------------------------------------------------------------------
# Model artifacts

_ARTIFACT_MAGIC = "stancemon-model"
_ARTIFACT_VERSION = 1


@dataclass(frozen=True)
class ModelArtifact:
    """Everything needed to score raw text: vocabulary, scheme, classifier."""

    kind: str
    scheme: str
    vocabulary: Vocabulary
    model: MnbModel | SvmModel


def save_model(artifact: ModelArtifact, path: str | Path) -> None:
    ordered_ngrams = [
        ngram for ngram, _ in sorted(artifact.vocabulary.entries.items(), key=lambda kv: kv[1])
    ]
    model = artifact.model
    if artifact.kind == MNB_KIND:
        params = {
            "log_prior": model.log_prior.tolist(),
            "log_likelihood": model.log_likelihood.tolist(),
            "smoothing_alpha": model.smoothing_alpha,
            "floor": model.floor,
        }
    elif artifact.kind == SVM_KIND:
        params = {
            "weights": model.weights.tolist(),
            "bias": model.bias.tolist(),
            "C": model.C,
        }
    else:
        raise ValueError(f"unknown model kind {artifact.kind!r}")
    payload = {
        "magic": _ARTIFACT_MAGIC,
        "version": _ARTIFACT_VERSION,
        "kind": artifact.kind,
        "scheme": artifact.scheme,
        "classes": list(model.classes),
        "vocabulary": ordered_ngrams,
        "params": params,
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.write("\n")


def load_model(path: str | Path, kind: str | None = None) -> ModelArtifact:
    """Load an artifact; fails on wrong magic, version, or (if given) kind."""
    try:
        with Path(path).open(encoding="utf-8") as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelArtifactError(f"{path} is not a model artifact: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("magic") != _ARTIFACT_MAGIC:
        raise ModelArtifactError(f"{path} is not a model artifact (bad magic)")
    version = payload.get("version")
    if version != _ARTIFACT_VERSION:
        raise ModelArtifactError(
            f"{path} has artifact version {version}, expected {_ARTIFACT_VERSION}"
        )
    actual_kind = payload.get("kind")
    if kind is not None and actual_kind != kind:
        raise ModelArtifactError(f"{path} holds a {actual_kind!r} model, expected {kind!r}")

    classes = tuple(payload["classes"])
    params = payload["params"]
    if actual_kind == MNB_KIND:
        model = MnbModel(
            classes=classes,
            log_prior=np.asarray(params["log_prior"], dtype=np.float64),
            log_likelihood=np.asarray(params["log_likelihood"], dtype=np.float64),
            smoothing_alpha=params["smoothing_alpha"],
            floor=params["floor"],
        )
    elif actual_kind == SVM_KIND:
        model = SvmModel(
            classes=classes,
            weights=np.asarray(params["weights"], dtype=np.float64),
            bias=np.asarray(params["bias"], dtype=np.float64),
            C=params["C"],
        )
    else:
        raise ModelArtifactError(f"{path} has unknown model kind {actual_kind!r}")
    vocabulary = Vocabulary(entries={ng: i for i, ng in enumerate(payload["vocabulary"])})
    return ModelArtifact(
        kind=actual_kind, scheme=payload["scheme"], vocabulary=vocabulary, model=model
    )
