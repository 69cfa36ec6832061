"""Tweet corpus loading and the three-step message filter.

Messages are dropped when they are retweets, contain a URL, or mention a
blacklisted term (by default words tied to animal and travel vaccination,
which are off-topic for the national immunization program).
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataFormatError

# Off-topic indicator words: animal ("dier"), agriculture ("landbouw"),
# tick ("teek").  Matched as lowercase substrings.
DEFAULT_BLACKLIST: tuple[str, ...] = ("dier", "landbouw", "teek")

# A URL counts as such only when the prefix is followed by a non-space char.
_URL_RE = re.compile(r"(?:https?://|www\.)\S")


@dataclass(frozen=True)
class Tweet:
    """One social-media message."""

    id: str
    text: str
    timestamp: str | None = None
    is_retweet: bool | None = None
    query_term: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("tweet id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"tweet {self.id!r} has empty text")


@dataclass(frozen=True)
class FilterConfig:
    remove_retweets: bool = True
    remove_urls: bool = True
    blacklist: tuple[str, ...] = DEFAULT_BLACKLIST

    def __post_init__(self):
        for term in self.blacklist:
            if not term or term != term.lower():
                raise ValueError(
                    f"blacklist terms must be non-empty lowercase strings, got {term!r}"
                )


@dataclass(frozen=True)
class FilterReport:
    """Surviving message counts after each filter stage."""

    before: int
    after_retweets: int
    after_urls: int
    after_blacklist: int

    def __post_init__(self):
        counts = (self.before, self.after_retweets, self.after_urls, self.after_blacklist)
        if any(c < 0 for c in counts):
            raise ValueError("filter counts must be non-negative")
        if not (self.before >= self.after_retweets >= self.after_urls >= self.after_blacklist):
            raise ValueError(f"filter counts must be non-increasing, got {counts}")


_TWEET_FIELDS = ("id", "text", "timestamp", "is_retweet", "query_term")


def _tweet_from_record(record: Mapping, line: int) -> Tweet:
    for key in ("id", "text"):
        if key not in record or record[key] is None or record[key] == "":
            raise DataFormatError(f"missing required field {key!r}", line=line)
    raw_id = record["id"]
    if not isinstance(raw_id, (str, int)):
        raise DataFormatError(f"field 'id' must be a string, got {type(raw_id).__name__}", line=line)
    text = record["text"]
    if not isinstance(text, str):
        raise DataFormatError(f"field 'text' must be a string, got {type(text).__name__}", line=line)
    is_retweet = record.get("is_retweet")
    if isinstance(is_retweet, str):
        lowered = is_retweet.strip().lower()
        is_retweet = None if lowered == "" else lowered in ("1", "true", "yes")
    try:
        return Tweet(
            id=str(raw_id),
            text=text,
            timestamp=record.get("timestamp") or None,
            is_retweet=is_retweet,
            query_term=record.get("query_term") or None,
        )
    except ValueError as exc:
        raise DataFormatError(str(exc), line=line) from exc


def _iter_jsonl_records(path: Path) -> Iterable[tuple[Mapping, int]]:
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(record, dict):
                raise DataFormatError("expected a JSON object", line=lineno)
            yield record, lineno


def _iter_csv_records(path: Path) -> Iterable[tuple[Mapping, int]]:
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        missing = {"id", "text"} - set(reader.fieldnames)
        if missing:
            raise DataFormatError(f"header is missing columns: {sorted(missing)}", line=1)
        for record in reader:
            if record.get(None):
                raise DataFormatError("row has more fields than the header", line=reader.line_num)
            yield record, reader.line_num


def load_corpus(path: str | Path, format: str = "jsonl") -> list[Tweet]:
    """Load tweets from a JSONL or CSV file, preserving file order.

    Raises DataFormatError on parse failures (with line number), missing
    required fields, or duplicate ids.
    """
    path = Path(path)
    if format == "jsonl":
        records = _iter_jsonl_records(path)
    elif format == "csv":
        records = _iter_csv_records(path)
    else:
        raise ValueError(f"unknown corpus format {format!r} (expected 'jsonl' or 'csv')")

    tweets: list[Tweet] = []
    seen: set[str] = set()
    for record, lineno in records:
        tweet = _tweet_from_record(record, lineno)
        if tweet.id in seen:
            raise DataFormatError(f"duplicate tweet id {tweet.id!r}", line=lineno)
        seen.add(tweet.id)
        tweets.append(tweet)
    return tweets


def save_corpus(tweets: Iterable[Tweet], path: str | Path) -> None:
    """Write tweets as JSONL, omitting unset optional fields."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for tweet in tweets:
            record = {"id": tweet.id, "text": tweet.text}
            for key in ("timestamp", "is_retweet", "query_term"):
                value = getattr(tweet, key)
                if value is not None:
                    record[key] = value
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _looks_like_retweet(tweet: Tweet) -> bool:
    return tweet.is_retweet is True or tweet.text.lower().startswith("rt @")


def _contains_url(text: str) -> bool:
    return _URL_RE.search(text) is not None


def _hits_blacklist(text: str, blacklist: tuple[str, ...]) -> bool:
    lowered = text.lower()
    return any(term in lowered for term in blacklist)


def apply_filters(tweets: list[Tweet], config: FilterConfig) -> tuple[list[Tweet], FilterReport]:
    """Apply the retweet, URL, and blacklist filters in order.

    Returns the surviving tweets (input order preserved) and the per-stage
    counts.  Disabled stages pass everything through.
    """
    after_retweets = [
        t for t in tweets if not (config.remove_retweets and _looks_like_retweet(t))
    ]
    after_urls = [
        t for t in after_retweets if not (config.remove_urls and _contains_url(t.text))
    ]
    survivors = [t for t in after_urls if not _hits_blacklist(t.text, config.blacklist)]
    report = FilterReport(
        before=len(tweets),
        after_retweets=len(after_retweets),
        after_urls=len(after_urls),
        after_blacklist=len(survivors),
    )
    return survivors, report
