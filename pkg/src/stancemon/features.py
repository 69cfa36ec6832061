"""Twitter-aware tokenization and binary n-gram feature extraction.

The tokenizer is a fixed rule cascade: URLs, then @mentions, then
#hashtags, then emoticons from a fixed list, then emoji codepoints, then
punctuation runs, then alphanumeric runs.  Everything except emoji is
lowercased.  Features are word 1/2/3-grams, coded binary, pruned to the
most document-frequent entries.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

# Words of an n-gram are joined with the unit-separator control character,
# which the tokenizer can never emit inside a token.
NGRAM_SEPARATOR = "\x1f"

DEFAULT_VOCABULARY_SIZE = 15_000


class TokenKind(Enum):
    WORD = "word"
    PUNCTUATION = "punctuation"
    MENTION = "mention"
    HASHTAG = "hashtag"
    URL = "url"
    EMOTICON = "emoticon"
    EMOJI = "emoji"


@dataclass(frozen=True)
class Token:
    surface: str
    kind: TokenKind

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")


# Longer emoticons listed first so the alternation prefers them; matching
# is case-insensitive (":D" and ":d" are the same face).
EMOTICONS: tuple[str, ...] = (
    ":-)", ":-(", ":-D", ":-P", ":-/", ";-)", ":')", ":'(",
    ":)", ":(", ":D", ":P", ";)", ":/", "=)", "=(",
    "-.-", "<3", "^^",
)

# Principal Unicode emoji blocks; one codepoint per token, an attached
# variation selector (U+FE0F) is absorbed.
_EMOJI_RANGES = (
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x1F1E6, 0x1F1FF),
)

_EMOJI_CLASS = "".join(f"{chr(lo)}-{chr(hi)}" for lo, hi in _EMOJI_RANGES)
_EMOTICON_ALT = "|".join(re.escape(e) for e in EMOTICONS)

_TOKEN_RE = re.compile(
    rf"""
    (?P<url>(?:https?://|www\.)\S+)
    |(?P<mention>@\w+)
    |(?P<hashtag>\#\w+)
    |(?P<emoticon>{_EMOTICON_ALT})
    |(?P<emoji>[{_EMOJI_CLASS}]️?)
    # Punctuation runs stop where an emoticon or emoji starts, so ":)" is
    # split out of "!!:)!!".
    |(?P<punctuation>(?:(?!{_EMOTICON_ALT})[^\w\s{_EMOJI_CLASS}])+)
    |(?P<word>\w+)
    """,
    re.VERBOSE | re.IGNORECASE | re.UNICODE,
)

_KIND_BY_GROUP = {
    "url": TokenKind.URL,
    "mention": TokenKind.MENTION,
    "hashtag": TokenKind.HASHTAG,
    "emoticon": TokenKind.EMOTICON,
    "emoji": TokenKind.EMOJI,
    "punctuation": TokenKind.PUNCTUATION,
    "word": TokenKind.WORD,
}


def tokenize(text: str) -> list[Token]:
    """Split a message into typed tokens; total on any input."""
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        kind = _KIND_BY_GROUP[match.lastgroup]
        surface = match.group()
        if kind is not TokenKind.EMOJI:
            surface = surface.lower()
        tokens.append(Token(surface=surface, kind=kind))
    return tokens


def extract_ngrams(tokens: Sequence[Token]) -> list[str]:
    """All contiguous 1-, 2-, and 3-grams of token surfaces, in that order."""
    surfaces = [t.surface for t in tokens]
    ngrams = list(surfaces)
    ngrams += [NGRAM_SEPARATOR.join(surfaces[i : i + 2]) for i in range(len(surfaces) - 1)]
    ngrams += [NGRAM_SEPARATOR.join(surfaces[i : i + 3]) for i in range(len(surfaces) - 2)]
    return ngrams


@dataclass(frozen=True)
class Vocabulary:
    """Frequency-pruned n-gram index; entries map n-gram -> feature index."""

    entries: dict[str, int]

    def __post_init__(self):
        indices = sorted(self.entries.values())
        if indices != list(range(len(self.entries))):
            raise ValueError("vocabulary indices must be a bijection onto 0..n-1")

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, path: str | Path) -> None:
        """Write entries as text lines "ngram<TAB>index" in index order.

        Backslashes and the in-token n-gram separator are escaped so the
        format stays line- and tab-delimited.
        """
        ordered = sorted(self.entries.items(), key=lambda kv: kv[1])
        with Path(path).open("w", encoding="utf-8") as fh:
            for ngram, index in ordered:
                escaped = ngram.replace("\\", "\\\\").replace(NGRAM_SEPARATOR, "\\u001f")
                fh.write(f"{escaped}\t{index}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        entries: dict[str, int] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                ngram, _, index = line.rpartition("\t")
                ngram = ngram.replace("\\u001f", NGRAM_SEPARATOR).replace("\\\\", "\\")
                entries[ngram] = int(index)
        return cls(entries=entries)


def build_vocabulary(
    training_docs: Iterable[Sequence[Token]],
    max_size: int = DEFAULT_VOCABULARY_SIZE,
) -> Vocabulary:
    """Rank n-grams by document frequency and keep the top max_size.

    Must only ever see training documents.  Ties in document frequency are
    broken by lexicographic n-gram order, ascending.
    """
    document_frequency: Counter[str] = Counter()
    for tokens in training_docs:
        document_frequency.update(set(extract_ngrams(tokens)))
    ranked = sorted(document_frequency.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(entries={ngram: i for i, (ngram, _) in enumerate(ranked[:max_size])})


@dataclass(frozen=True)
class FeatureVector:
    """Binary presence vector, stored as strictly increasing feature indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("feature indices must be strictly increasing")
        if self.indices and self.indices[0] < 0:
            raise ValueError("feature indices must be non-negative")


def vectorize(tokens: Sequence[Token], vocab: Vocabulary) -> FeatureVector:
    """Binary-code the document's in-vocabulary n-grams; OOV is dropped."""
    entries = vocab.entries
    hits = {entries[ng] for ng in extract_ngrams(tokens) if ng in entries}
    return FeatureVector(indices=tuple(sorted(hits)))
