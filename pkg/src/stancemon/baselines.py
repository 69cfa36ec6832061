"""Rule-based lexicon sentiment baseline and random baselines.

The lexicon scorer mirrors classic adjective-list sentiment analysis: a
message's score is the product of its matched entry polarities, where a
matched bigram ("horribly good") counts as a single entry.  The discrete
Negative/Neutral/Positive decision comes from a threshold rule tuned for
Negative-class F1 on training data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataFormatError
from .features import Token

NEGATIVE_LABEL = "Negative"
NEUTRAL_LABEL = "Neutral"
POSITIVE_LABEL = "Positive"


@dataclass(frozen=True)
class PolarityLexicon:
    unigrams: dict[str, float]
    bigrams: dict[tuple[str, str], float]

    def __post_init__(self):
        for key, value in self.unigrams.items():
            _check_entry(key, value)
        for (first, second), value in self.bigrams.items():
            _check_entry(first, value)
            _check_entry(second, value)


def _check_entry(word: str, polarity: float) -> None:
    if not word or word != word.lower():
        raise ValueError(f"lexicon keys must be non-empty lowercase, got {word!r}")
    if not -1.0 <= polarity <= 1.0:
        raise ValueError(f"polarity for {word!r} out of [-1, 1]: {polarity}")


@dataclass(frozen=True)
class ThresholdRule:
    """Score cuts: below -> Negative, above -> Positive, else Neutral."""

    negative_below: float
    positive_above: float

    def __post_init__(self):
        if self.negative_below > self.positive_above:
            raise ValueError("negative_below must not exceed positive_above")


def load_lexicon(path: str | Path) -> PolarityLexicon:
    """Read a TSV lexicon: "word<TAB>polarity" or "word1 word2<TAB>polarity"."""
    unigrams: dict[str, float] = {}
    bigrams: dict[tuple[str, str], float] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataFormatError("expected 'words<TAB>polarity'", line=lineno)
            words = parts[0].split()
            try:
                polarity = float(parts[1])
            except ValueError:
                raise DataFormatError(f"invalid polarity {parts[1]!r}", line=lineno) from None
            try:
                if len(words) == 1:
                    _check_entry(words[0], polarity)
                    unigrams[words[0]] = polarity
                elif len(words) == 2:
                    _check_entry(words[0], polarity)
                    _check_entry(words[1], polarity)
                    bigrams[(words[0], words[1])] = polarity
                else:
                    raise DataFormatError("entries have one or two words", line=lineno)
            except ValueError as exc:
                raise DataFormatError(str(exc), line=lineno) from exc
    return PolarityLexicon(unigrams=unigrams, bigrams=bigrams)


def load_demo_lexicon() -> PolarityLexicon:
    """Small Dutch lexicon bundled for tests and the synthetic corpus."""
    with resources.as_file(
        resources.files("stancemon").joinpath("data/demo_lexicon_nl.tsv")
    ) as path:
        return load_lexicon(path)


def lexicon_score(tokens: Sequence[Token], lexicon: PolarityLexicon) -> float:
    """Product of matched entry polarities, clamped to [-1, 1]; 0 when
    nothing matches.

    Scans left to right; a bigram entry consumes both tokens and
    contributes one polarity, so its words never also count as unigrams.
    """
    surfaces = [t.surface for t in tokens]
    factors = []
    i = 0
    while i < len(surfaces):
        if i + 1 < len(surfaces) and (surfaces[i], surfaces[i + 1]) in lexicon.bigrams:
            factors.append(lexicon.bigrams[(surfaces[i], surfaces[i + 1])])
            i += 2
        else:
            if surfaces[i] in lexicon.unigrams:
                factors.append(lexicon.unigrams[surfaces[i]])
            i += 1
    if not factors:
        return 0.0
    return min(1.0, max(-1.0, math.prod(factors)))


def _negative_f1(scored: Sequence[tuple[float, bool]], cut: float) -> float:
    tp = fp = fn = 0
    for score, is_negative in scored:
        predicted = score < cut
        if predicted and is_negative:
            tp += 1
        elif predicted:
            fp += 1
        elif is_negative:
            fn += 1
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def tune_threshold(scored: Sequence[tuple[float, bool]]) -> ThresholdRule:
    """Pick the Negative cut that maximizes Negative-class F1.

    Candidate cuts are the midpoints between adjacent distinct scores plus
    the two infinities; ties prefer the lower cut (higher precision).  The
    positive cut stays at 0.0 unless the chosen negative cut is above it.
    """
    negatives = sum(1 for _, is_negative in scored if is_negative)
    if negatives == 0 or negatives == len(scored):
        raise ValueError("threshold tuning needs both negative and non-negative instances")
    distinct = sorted({score for score, _ in scored})
    candidates = [-math.inf]
    candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    candidates += [math.inf]
    best_cut = candidates[0]
    best_f1 = -1.0
    for cut in candidates:
        f1 = _negative_f1(scored, cut)
        if f1 > best_f1:
            best_f1, best_cut = f1, cut
    return ThresholdRule(negative_below=best_cut, positive_above=max(0.0, best_cut))


def lexicon_classify(score: float, rule: ThresholdRule) -> str:
    if score < rule.negative_below:
        return NEGATIVE_LABEL
    if score > rule.positive_above:
        return POSITIVE_LABEL
    return NEUTRAL_LABEL


def random_baseline(n: int, p: float, seed: int) -> list[bool]:
    """Independently flag each position with probability p, reproducibly."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    return (rng.random(n) < p).tolist()
