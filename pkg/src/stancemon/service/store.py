"""Review queue and feedback persistence for the human-in-the-loop service.

State is file-backed: every queued item and every verdict is appended to a
JSONL log, so a restart replays to the identical queue and judgment state.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from ..annotation import (
    NEGATIVE,
    NOT_CLEAR,
    OTHER,
    LabeledInstance,
    LabelingScheme,
    Reliability,
)
from ..errors import StancemonError


class ReviewStatus(Enum):
    PENDING = "pending"
    CONFIRMED_NEGATIVE = "confirmed_negative"
    REJECTED_NEGATIVE = "rejected_negative"


class UnknownItemError(StancemonError):
    pass


class AlreadyJudgedError(StancemonError):
    pass


@dataclass(frozen=True)
class ReviewItem:
    tweet_id: str
    text: str
    negative_score: float
    predicted_label: str
    status: ReviewStatus = ReviewStatus.PENDING
    verdict_time: str | None = None


@dataclass(frozen=True)
class FeedbackEntry:
    tweet_id: str
    text: str
    verdict: str  # Negative | Other
    time: str


def non_negative_catchall(scheme: LabelingScheme) -> str:
    """Training label for a rejected flag: the scheme's least-assumptive
    non-negative category."""
    return NOT_CLEAR if NOT_CLEAR in scheme.categories else OTHER


class ReviewStore:
    """In-memory review state with an append-only JSONL log per file.

    Thread-safe: reads and writes go through one lock; verdicts are
    one-shot per tweet id.
    """

    def __init__(self, data_dir: str | Path | None = None):
        self._lock = threading.RLock()
        self._items: dict[str, ReviewItem] = {}
        self._feedback: list[FeedbackEntry] = []
        self._queue_path: Path | None = None
        self._feedback_path: Path | None = None
        if data_dir is not None:
            data_dir = Path(data_dir)
            data_dir.mkdir(parents=True, exist_ok=True)
            self._queue_path = data_dir / "queue.jsonl"
            self._feedback_path = data_dir / "feedback.jsonl"
            self._replay()

    def _replay(self) -> None:
        if self._queue_path and self._queue_path.exists():
            with self._queue_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    row = json.loads(line)
                    item = ReviewItem(
                        tweet_id=row["tweet_id"],
                        text=row["text"],
                        negative_score=row["negative_score"],
                        predicted_label=row["predicted_label"],
                    )
                    self._items[item.tweet_id] = item
        if self._feedback_path and self._feedback_path.exists():
            with self._feedback_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    row = json.loads(line)
                    entry = FeedbackEntry(**row)
                    self._feedback.append(entry)
                    item = self._items.get(entry.tweet_id)
                    if item is not None:
                        status = (
                            ReviewStatus.CONFIRMED_NEGATIVE
                            if entry.verdict == NEGATIVE
                            else ReviewStatus.REJECTED_NEGATIVE
                        )
                        self._items[entry.tweet_id] = replace(
                            item, status=status, verdict_time=entry.time
                        )

    @staticmethod
    def _append(path: Path | None, row: dict) -> None:
        if path is None:
            return
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")

    def add_item(self, item: ReviewItem) -> bool:
        """Queue a flagged message; returns False when the id is known."""
        with self._lock:
            if item.tweet_id in self._items:
                return False
            self._items[item.tweet_id] = item
            self._append(
                self._queue_path,
                {
                    "tweet_id": item.tweet_id,
                    "text": item.text,
                    "negative_score": item.negative_score,
                    "predicted_label": item.predicted_label,
                },
            )
            return True

    def pending(self, limit: int | None = None) -> list[ReviewItem]:
        """Pending items, negative score descending, then tweet id."""
        with self._lock:
            items = [
                item
                for item in self._items.values()
                if item.status is ReviewStatus.PENDING
            ]
        items.sort(key=lambda item: (-item.negative_score, item.tweet_id))
        return items[:limit] if limit is not None else items

    def get(self, tweet_id: str) -> ReviewItem | None:
        with self._lock:
            return self._items.get(tweet_id)

    def record_verdict(self, tweet_id: str, verdict: str) -> ReviewItem:
        """Resolve a pending item; the verdict becomes training feedback."""
        if verdict not in (NEGATIVE, OTHER):
            raise ValueError(f"verdict must be {NEGATIVE!r} or {OTHER!r}, got {verdict!r}")
        with self._lock:
            item = self._items.get(tweet_id)
            if item is None:
                raise UnknownItemError(f"no review item with id {tweet_id!r}")
            if item.status is not ReviewStatus.PENDING:
                raise AlreadyJudgedError(f"item {tweet_id!r} was already judged")
            now = datetime.now(timezone.utc).isoformat()
            status = (
                ReviewStatus.CONFIRMED_NEGATIVE
                if verdict == NEGATIVE
                else ReviewStatus.REJECTED_NEGATIVE
            )
            updated = replace(item, status=status, verdict_time=now)
            self._items[tweet_id] = updated
            entry = FeedbackEntry(
                tweet_id=tweet_id, text=item.text, verdict=verdict, time=now
            )
            self._feedback.append(entry)
            self._append(
                self._feedback_path,
                {
                    "tweet_id": entry.tweet_id,
                    "text": entry.text,
                    "verdict": entry.verdict,
                    "time": entry.time,
                },
            )
            return updated

    def counts(self) -> tuple[int, int, int]:
        """(pending, confirmed, rejected)."""
        with self._lock:
            statuses = [item.status for item in self._items.values()]
        return (
            sum(1 for s in statuses if s is ReviewStatus.PENDING),
            sum(1 for s in statuses if s is ReviewStatus.CONFIRMED_NEGATIVE),
            sum(1 for s in statuses if s is ReviewStatus.REJECTED_NEGATIVE),
        )

    def feedback_instances(self, scheme: LabelingScheme) -> list[LabeledInstance]:
        """Verdicts as strict-reliability training instances under a scheme."""
        catchall = non_negative_catchall(scheme)
        with self._lock:
            entries = list(self._feedback)
        return [
            LabeledInstance(
                tweet_id=entry.tweet_id,
                text=entry.text,
                label=NEGATIVE if entry.verdict == NEGATIVE else catchall,
                reliability=Reliability.STRICT,
            )
            for entry in entries
        ]

    def items_snapshot(self) -> list[ReviewItem]:
        with self._lock:
            return list(self._items.values())
