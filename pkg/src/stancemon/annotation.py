"""Per-annotator judgments and their aggregation into labeled datasets.

Each tweet carries up to two annotations over four categorizations
(relevance, subject, stance, sentiment).  A labeling scheme collapses an
annotation into a single training label; tweets then land in one of three
reliability tiers: strict (two annotators, same label), lax (two
annotators, label resolved by category priority), or one (a single
annotator).
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Tweet
from .errors import DataFormatError


class Relevance(Enum):
    RELEVANT = "Relevant"
    RELEVANT_ABROAD = "RelevantAbroad"
    IRRELEVANT = "Irrelevant"


class Subject(Enum):
    VACCINE = "Vaccine"
    DISEASE = "Disease"
    BOTH = "Both"


class Stance(Enum):
    NEGATIVE = "Negative"
    POSITIVE = "Positive"
    NEUTRAL = "Neutral"
    NOT_CLEAR = "NotClear"


class Sentiment(Enum):
    INFORMATIVE = "Informative"
    ANGER = "Anger"
    WORRY = "Worry"
    RELIEVED = "Relieved"
    OTHER = "Other"


# Label names shared by the schemes.
NEGATIVE = "Negative"
POSITIVE = "Positive"
NEUTRAL = "Neutral"
NOT_CLEAR = "NotClear"
IRRELEVANT = "Irrelevant"
OTHER = "Other"
POSITIVE_FRUSTRATION = "Positive+Frustration"
POSITIVE_INFORMATION = "Positive+Information"
POSITIVE_OTHER = "Positive+Other"


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's judgment of one tweet."""

    tweet_id: str
    annotator_id: str
    relevance: Relevance
    subject: Subject | None = None
    stance: Stance | None = None
    sentiment: Sentiment | None = None

    def __post_init__(self):
        if not self.tweet_id or not self.annotator_id:
            raise ValueError("tweet_id and annotator_id must be non-empty")
        if self.relevance is Relevance.IRRELEVANT:
            if self.subject or self.stance or self.sentiment:
                raise ValueError(
                    f"irrelevant annotation of tweet {self.tweet_id!r} must not "
                    "carry subject, stance, or sentiment"
                )
        elif self.stance is None:
            raise ValueError(
                f"relevant annotation of tweet {self.tweet_id!r} must carry a stance"
            )


@dataclass(frozen=True)
class LabelingScheme:
    """One of the four label granularities.

    ``priority`` orders the scheme's categories by preference for resolving
    two-annotator disagreements; Negative always comes first.
    """

    name: str
    priority: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.priority)) != len(self.priority):
            raise ValueError(f"scheme {self.name!r} has duplicate categories")
        if self.priority[0] != NEGATIVE:
            raise ValueError(f"scheme {self.name!r} must rank {NEGATIVE!r} first")

    @property
    def categories(self) -> tuple[str, ...]:
        return self.priority

    def priority_index(self, label: str) -> int:
        return self.priority.index(label)


BINARY = LabelingScheme("binary", (NEGATIVE, OTHER))
# Disagreements involving Irrelevant resolve to the other label: the lax
# tier never adds Irrelevant instances.
IRRELEVANCE_FILTER = LabelingScheme("irrelevance_filter", (NEGATIVE, OTHER, IRRELEVANT))
POLARITY = LabelingScheme(
    "polarity", (NEGATIVE, POSITIVE, NEUTRAL, NOT_CLEAR, IRRELEVANT)
)
POLARITY_SENTIMENT = LabelingScheme(
    "polarity_sentiment",
    (
        NEGATIVE,
        POSITIVE_FRUSTRATION,
        POSITIVE_INFORMATION,
        POSITIVE_OTHER,
        NEUTRAL,
        NOT_CLEAR,
        IRRELEVANT,
    ),
)

SCHEMES: dict[str, LabelingScheme] = {
    scheme.name: scheme
    for scheme in (BINARY, IRRELEVANCE_FILTER, POLARITY, POLARITY_SENTIMENT)
}


class Reliability(Enum):
    STRICT = "strict"
    LAX = "lax"
    ONE = "one"


class TrainVariant(Enum):
    """Which reliability tiers feed the training set."""

    STRICT = "strict"
    STRICT_LAX = "strict_lax"
    STRICT_ONE = "strict_one"
    STRICT_LAX_ONE = "strict_lax_one"

    @property
    def tiers(self) -> tuple[Reliability, ...]:
        return _VARIANT_TIERS[self]


_VARIANT_TIERS = {
    TrainVariant.STRICT: (Reliability.STRICT,),
    TrainVariant.STRICT_LAX: (Reliability.STRICT, Reliability.LAX),
    TrainVariant.STRICT_ONE: (Reliability.STRICT, Reliability.ONE),
    TrainVariant.STRICT_LAX_ONE: (Reliability.STRICT, Reliability.LAX, Reliability.ONE),
}


@dataclass(frozen=True)
class LabeledInstance:
    tweet_id: str
    text: str
    label: str
    reliability: Reliability


@dataclass(frozen=True)
class LabeledDataset:
    scheme: LabelingScheme
    strict: tuple[LabeledInstance, ...]
    lax: tuple[LabeledInstance, ...]
    one: tuple[LabeledInstance, ...]

    def tier(self, reliability: Reliability) -> tuple[LabeledInstance, ...]:
        return {
            Reliability.STRICT: self.strict,
            Reliability.LAX: self.lax,
            Reliability.ONE: self.one,
        }[reliability]


def derive_label(record: AnnotationRecord, scheme: LabelingScheme) -> str:
    """Collapse one annotation into the scheme's label.

    Relevant and RelevantAbroad are treated identically; subject
    annotations are ignored throughout.
    """
    irrelevant = record.relevance is Relevance.IRRELEVANT
    if scheme.name == "binary":
        return NEGATIVE if record.stance is Stance.NEGATIVE else OTHER
    if scheme.name == "irrelevance_filter":
        if record.stance is Stance.NEGATIVE:
            return NEGATIVE
        return IRRELEVANT if irrelevant else OTHER
    if scheme.name == "polarity":
        return IRRELEVANT if irrelevant else record.stance.value
    if scheme.name == "polarity_sentiment":
        if irrelevant:
            return IRRELEVANT
        if record.stance is Stance.POSITIVE:
            if record.sentiment is Sentiment.ANGER:
                return POSITIVE_FRUSTRATION
            if record.sentiment is Sentiment.INFORMATIVE:
                return POSITIVE_INFORMATION
            return POSITIVE_OTHER
        return record.stance.value
    raise ValueError(f"unknown labeling scheme {scheme.name!r}")


def aggregate(
    records: Sequence[AnnotationRecord],
    tweets: Mapping[str, Tweet],
    scheme: LabelingScheme,
) -> LabeledDataset:
    """Group annotations per tweet and assign reliability tiers.

    Two equal derived labels -> strict; two unequal -> lax, resolved to the
    label that comes first in the scheme's priority; a single annotation ->
    one.  More than two annotations for a tweet is an error.
    """
    by_tweet: dict[str, list[AnnotationRecord]] = {}
    for record in records:
        if record.tweet_id not in tweets:
            raise DataFormatError(
                f"annotation references unknown tweet id {record.tweet_id!r}"
            )
        by_tweet.setdefault(record.tweet_id, []).append(record)

    strict: list[LabeledInstance] = []
    lax: list[LabeledInstance] = []
    one: list[LabeledInstance] = []
    for tweet_id, group in by_tweet.items():
        if len(group) > 2:
            raise DataFormatError(
                f"tweet {tweet_id!r} has {len(group)} annotations; at most 2 are supported"
            )
        labels = [derive_label(record, scheme) for record in group]
        text = tweets[tweet_id].text
        if len(labels) == 1:
            one.append(LabeledInstance(tweet_id, text, labels[0], Reliability.ONE))
        elif labels[0] == labels[1]:
            strict.append(LabeledInstance(tweet_id, text, labels[0], Reliability.STRICT))
        else:
            resolved = min(labels, key=scheme.priority_index)
            lax.append(LabeledInstance(tweet_id, text, resolved, Reliability.LAX))
    return LabeledDataset(scheme=scheme, strict=tuple(strict), lax=tuple(lax), one=tuple(one))


def compose_training(dataset: LabeledDataset, variant: TrainVariant) -> list[LabeledInstance]:
    """Concatenate the variant's reliability tiers (strict always included)."""
    instances: list[LabeledInstance] = []
    for tier in variant.tiers:
        instances.extend(dataset.tier(tier))
    counts = Counter(inst.tweet_id for inst in instances)
    duplicates = [tweet_id for tweet_id, n in counts.items() if n > 1]
    if duplicates:
        raise ValueError(f"training tiers overlap on tweet ids {duplicates[:5]}")
    return instances


# ---------------------------------------------------------------------------
# Annotation and dataset file I/O

_ANNOTATION_COLUMNS = ("tweet_id", "annotator_id", "relevance", "subject", "stance", "sentiment")


def _parse_enum(enum_cls, raw: str | None, column: str, line: int):
    if raw is None or raw == "":
        return None
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(member.value for member in enum_cls)
        raise DataFormatError(
            f"invalid {column} value {raw!r} (expected one of: {valid})", line=line
        ) from None


def _record_from_row(row: Mapping[str, str | None], line: int) -> AnnotationRecord:
    for key in ("tweet_id", "annotator_id", "relevance"):
        if not row.get(key):
            raise DataFormatError(f"missing required field {key!r}", line=line)
    relevance = _parse_enum(Relevance, row["relevance"], "relevance", line)
    try:
        return AnnotationRecord(
            tweet_id=str(row["tweet_id"]),
            annotator_id=str(row["annotator_id"]),
            relevance=relevance,
            subject=_parse_enum(Subject, row.get("subject"), "subject", line),
            stance=_parse_enum(Stance, row.get("stance"), "stance", line),
            sentiment=_parse_enum(Sentiment, row.get("sentiment"), "sentiment", line),
        )
    except ValueError as exc:
        raise DataFormatError(str(exc), line=line) from exc


def load_annotations(path: str | Path, format: str = "csv") -> list[AnnotationRecord]:
    """Read annotation records from CSV (or an equivalent JSONL)."""
    path = Path(path)
    records: list[AnnotationRecord] = []
    if format == "csv":
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return []
            missing = {"tweet_id", "annotator_id", "relevance"} - set(reader.fieldnames)
            if missing:
                raise DataFormatError(f"header is missing columns: {sorted(missing)}", line=1)
            for row in reader:
                records.append(_record_from_row(row, reader.line_num))
    elif format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                try:
                    row = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise DataFormatError(f"invalid JSON: {exc.msg}", line=lineno) from exc
                records.append(_record_from_row(row, lineno))
    else:
        raise ValueError(f"unknown annotation format {format!r} (expected 'csv' or 'jsonl')")
    return records


def save_annotations(records: Iterable[AnnotationRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ANNOTATION_COLUMNS)
        for record in records:
            writer.writerow(
                [
                    record.tweet_id,
                    record.annotator_id,
                    record.relevance.value,
                    record.subject.value if record.subject else "",
                    record.stance.value if record.stance else "",
                    record.sentiment.value if record.sentiment else "",
                ]
            )


_DATASET_MAGIC = "stancemon-dataset"


def save_dataset(dataset: LabeledDataset, path: str | Path) -> None:
    payload = {
        "magic": _DATASET_MAGIC,
        "version": 1,
        "scheme": dataset.scheme.name,
        "strict": [_instance_to_json(i) for i in dataset.strict],
        "lax": [_instance_to_json(i) for i in dataset.lax],
        "one": [_instance_to_json(i) for i in dataset.one],
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def load_dataset(path: str | Path) -> LabeledDataset:
    with Path(path).open(encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid dataset file: {exc.msg}") from exc
    if not isinstance(payload, dict) or payload.get("magic") != _DATASET_MAGIC:
        raise DataFormatError(f"{path} is not a labeled-dataset file")
    scheme = SCHEMES.get(payload.get("scheme"))
    if scheme is None:
        raise DataFormatError(f"unknown scheme {payload.get('scheme')!r} in {path}")
    tiers = {}
    for name, reliability in (
        ("strict", Reliability.STRICT),
        ("lax", Reliability.LAX),
        ("one", Reliability.ONE),
    ):
        tiers[name] = tuple(
            LabeledInstance(row["tweet_id"], row["text"], row["label"], reliability)
            for row in payload.get(name, [])
        )
    return LabeledDataset(scheme=scheme, **tiers)


def _instance_to_json(instance: LabeledInstance) -> dict:
    return {"tweet_id": instance.tweet_id, "text": instance.text, "label": instance.label}
