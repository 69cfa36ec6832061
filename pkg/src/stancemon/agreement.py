"""Inter-annotator agreement: percent agreement, Krippendorff's alpha,
and per-category mutual F-scores.

Alpha uses the coincidence-matrix formulation with the nominal difference
function and tolerates missing values: units contribute only their
pairable values, and units with fewer than two values are excluded.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

Label = Hashable


@dataclass(frozen=True)
class AgreementReport:
    """Agreement metrics for one categorization.

    ``alpha`` is None when expected disagreement is zero (only a single
    category was ever used), which leaves the coefficient undefined.
    """

    percent_agreement: float
    alpha: float | None
    mutual_f: dict[Label, float]
    n_units: int


def percent_agreement(pairs: Sequence[tuple[Label, Label]]) -> float:
    """Fraction of annotation pairs whose two labels are equal."""
    if not pairs:
        raise ValueError("percent_agreement requires at least one pair")
    return sum(1 for a, b in pairs if a == b) / len(pairs)


def krippendorff_alpha(units: Iterable[tuple[Hashable, Sequence[Label]]]) -> float | None:
    """Nominal-metric alpha over units of pairable values.

    Each unit with m >= 2 values adds 1/(m-1) to the coincidence matrix for
    every ordered pair of its values; units with fewer values are skipped.
    Returns None when expected disagreement is zero.
    """
    coincidence: Counter[tuple[Label, Label]] = Counter()
    for _, values in units:
        m = len(values)
        if m < 2:
            continue
        weight = 1.0 / (m - 1)
        for i, a in enumerate(values):
            for j, b in enumerate(values):
                if i != j:
                    coincidence[(a, b)] += weight
    if not coincidence:
        raise ValueError("no units with at least two values")

    marginals: Counter[Label] = Counter()
    for (a, _), count in coincidence.items():
        marginals[a] += count
    n = sum(marginals.values())

    observed = sum(count for (a, b), count in coincidence.items() if a != b) / n
    expected = sum(
        marginals[a] * marginals[b]
        for a in marginals
        for b in marginals
        if a != b
    ) / (n * (n - 1))
    if expected == 0.0:
        return None
    return 1.0 - observed / expected


def mutual_f_scores(pairs: Sequence[tuple[Label, Label]]) -> dict[Label, float]:
    """Per-category F1 with the two annotators as classifier and truth.

    Swapping the annotators exchanges false positives and false negatives,
    so the score is role-symmetric: F(c) = 2*N_both / (N_first + N_second).
    """
    if not pairs:
        raise ValueError("mutual_f_scores requires at least one pair")
    first: Counter[Label] = Counter(a for a, _ in pairs)
    second: Counter[Label] = Counter(b for _, b in pairs)
    both: Counter[Label] = Counter(a for a, b in pairs if a == b)
    scores = {}
    for category in sorted(set(first) | set(second), key=repr):
        denominator = first[category] + second[category]
        scores[category] = 2.0 * both[category] / denominator if denominator else 0.0
    return scores


def build_report(units: Sequence[tuple[Hashable, Sequence[Label]]]) -> AgreementReport:
    """Compute all three metrics over per-unit value lists.

    Pairs for percent agreement and mutual F are all unordered value pairs
    within each unit (with two annotators per unit this is simply the pair).
    """
    pairs: list[tuple[Label, Label]] = []
    n_units = 0
    for _, values in units:
        if len(values) < 2:
            continue
        n_units += 1
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                pairs.append((values[i], values[j]))
    if not pairs:
        raise ValueError("no units with at least two values")
    return AgreementReport(
        percent_agreement=percent_agreement(pairs),
        alpha=krippendorff_alpha(units),
        mutual_f=mutual_f_scores(pairs),
        n_units=n_units,
    )
