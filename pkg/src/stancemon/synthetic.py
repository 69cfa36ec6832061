"""Deterministic synthetic corpus for experiments and tests.

Generates Dutch-flavored messages whose Negative class is lexically
separable at roughly the base rate seen in real vaccination discussions
(~15%), together with simulated noisy annotations from a pool of
annotators.  A slice of decoy messages (retweets, URLs, blacklisted
topics) exercises the corpus filter; decoys carry no annotations.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .annotation import (
    AnnotationRecord,
    Relevance,
    Sentiment,
    Stance,
    Subject,
    save_annotations,
)
from .corpus import Tweet, save_corpus

DEFAULT_SEED = 42
DEFAULT_SIZE = 3000

_FILLER = (
    "de", "het", "een", "ik", "je", "we", "ze", "dat", "dit", "met",
    "voor", "ook", "maar", "wel", "er", "op", "in", "van", "is", "nog",
    "dus", "echt", "toch", "weer",
)
_TOPIC = ("vaccin", "prik", "inenting", "vaccinatie", "bmr", "hpv", "griepprik", "rvp")

# Negative markers split into words the demo lexicon knows and words only a
# trained classifier can pick up.
_NEGATIVE_COVERED = ("gif", "schadelijk", "onzin", "eng", "schandalig", "gevaarlijk")
_NEGATIVE_UNCOVERED = (
    "weiger", "wantrouwen", "prikspijt", "farmalobby", "bijwerking", "complot",
)
_NEGATIVE_MARKERS = _NEGATIVE_COVERED + _NEGATIVE_UNCOVERED
_POSITIVE_MARKERS = (
    "beschermt", "veilig", "belangrijk", "verstandig", "effectief",
    "blij", "goed", "fijn", "gezond", "wetenschap",
)
_NEUTRAL_MARKERS = (
    "vandaag", "ggd", "afspraak", "programma", "informatie",
    "nieuws", "bericht", "cijfers", "overzicht", "regio",
)
_NOT_CLEAR_MARKERS = ("vraag", "discussie", "meningen", "lastig", "verwarrend", "hmm")
# Animal words that do not contain any default blacklist substring, so
# irrelevant messages survive filtering and stay available for labeling.
_IRRELEVANT_MARKERS = ("kat", "hond", "konijn", "paard", "kip", "asiel", "pup", "stal")

_PUNCTUATION = ("!", "?", "...", "!!")
_EMOTICONS = (":)", ":(", ";)", ":D")

_STANCE_MIX = (
    (Stance.NEGATIVE, 0.15),
    (Stance.POSITIVE, 0.40),
    (Stance.NEUTRAL, 0.19),
    (Stance.NOT_CLEAR, 0.08),
    (None, 0.18),  # irrelevant
)

_SENTIMENT_MIX = {
    Stance.NEGATIVE: ((Sentiment.WORRY, 0.45), (Sentiment.ANGER, 0.30),
                      (Sentiment.OTHER, 0.20), (Sentiment.INFORMATIVE, 0.05)),
    Stance.POSITIVE: ((Sentiment.ANGER, 0.30), (Sentiment.INFORMATIVE, 0.35),
                      (Sentiment.OTHER, 0.20), (Sentiment.RELIEVED, 0.15)),
    Stance.NEUTRAL: ((Sentiment.INFORMATIVE, 0.70), (Sentiment.OTHER, 0.30)),
    Stance.NOT_CLEAR: ((Sentiment.OTHER, 0.60), (Sentiment.WORRY, 0.20),
                       (Sentiment.INFORMATIVE, 0.20)),
}

_DOUBLE_ANNOTATION_RATE = 0.72
_STANCE_ERROR_RATE = 0.13
_RELEVANCE_DROP_RATE = 0.04   # relevant tweet judged irrelevant
_RELEVANCE_GAIN_RATE = 0.06   # irrelevant tweet judged relevant
_SENTIMENT_ERROR_RATE = 0.15
_MARKER_LEAK_RATE = 0.05      # off-class negative marker in other messages
_N_ANNOTATORS = 30


def _pick(rng: np.random.Generator, mix) -> object:
    values, weights = zip(*mix)
    return values[rng.choice(len(values), p=np.asarray(weights) / sum(weights))]


def _sample(rng: np.random.Generator, pool, k: int) -> list[str]:
    return [pool[i] for i in rng.choice(len(pool), size=k, replace=False)]


def _compose_text(rng: np.random.Generator, markers: list[str], phrase: list[str]) -> str:
    words = _sample(rng, _FILLER, int(rng.integers(3, 7)))
    words += _sample(rng, _TOPIC, int(rng.integers(1, 3)))
    words += markers
    rng.shuffle(words)
    if phrase:
        at = int(rng.integers(0, len(words) + 1))
        words[at:at] = phrase
    if rng.random() < 0.35:
        words.append(str(_PUNCTUATION[rng.integers(0, len(_PUNCTUATION))]))
    if rng.random() < 0.15:
        words.append(str(_EMOTICONS[rng.integers(0, len(_EMOTICONS))]))
    text = " ".join(words)
    if rng.random() < 0.5:
        text = text[0].upper() + text[1:]
    return text


def _true_markers(rng: np.random.Generator, stance: Stance | None) -> tuple[list[str], list[str]]:
    """Class-bearing words plus an optional adjacent bigram phrase."""
    phrase: list[str] = []
    if stance is Stance.NEGATIVE:
        markers = _sample(rng, _NEGATIVE_MARKERS, int(rng.integers(1, 4)))
        if rng.random() < 0.15:
            phrase = ["niet", "goed"]
    elif stance is Stance.POSITIVE:
        markers = _sample(rng, _POSITIVE_MARKERS, int(rng.integers(1, 3)))
    elif stance is Stance.NEUTRAL:
        markers = _sample(rng, _NEUTRAL_MARKERS, int(rng.integers(1, 3)))
    elif stance is Stance.NOT_CLEAR:
        markers = _sample(rng, _NOT_CLEAR_MARKERS, int(rng.integers(1, 3)))
    else:
        markers = _sample(rng, _IRRELEVANT_MARKERS, int(rng.integers(2, 4)))
    if stance is not Stance.NEGATIVE and rng.random() < _MARKER_LEAK_RATE:
        markers += _sample(rng, _NEGATIVE_MARKERS, 1)
    return markers, phrase


def _noisy_stance(rng: np.random.Generator, true_stance: Stance) -> Stance:
    if rng.random() >= _STANCE_ERROR_RATE:
        return true_stance
    others = [s for s in Stance if s is not true_stance]
    return others[rng.integers(0, len(others))]


def _noisy_sentiment(rng: np.random.Generator, true_sentiment: Sentiment) -> Sentiment:
    if rng.random() >= _SENTIMENT_ERROR_RATE:
        return true_sentiment
    others = [s for s in Sentiment if s is not true_sentiment]
    return others[rng.integers(0, len(others))]


def _annotate(
    rng: np.random.Generator,
    tweet_id: str,
    true_stance: Stance | None,
    true_sentiment: Sentiment | None,
    annotator: str,
) -> AnnotationRecord:
    if true_stance is None:
        if rng.random() < _RELEVANCE_GAIN_RATE:
            stance = list(Stance)[rng.integers(0, len(Stance))]
            return AnnotationRecord(
                tweet_id=tweet_id, annotator_id=annotator,
                relevance=Relevance.RELEVANT, subject=Subject.VACCINE,
                stance=stance, sentiment=Sentiment.OTHER,
            )
        return AnnotationRecord(
            tweet_id=tweet_id, annotator_id=annotator, relevance=Relevance.IRRELEVANT
        )
    if rng.random() < _RELEVANCE_DROP_RATE:
        return AnnotationRecord(
            tweet_id=tweet_id, annotator_id=annotator, relevance=Relevance.IRRELEVANT
        )
    relevance = (
        Relevance.RELEVANT_ABROAD if rng.random() < 0.07 else Relevance.RELEVANT
    )
    subject = list(Subject)[rng.integers(0, len(Subject))]
    return AnnotationRecord(
        tweet_id=tweet_id,
        annotator_id=annotator,
        relevance=relevance,
        subject=subject,
        stance=_noisy_stance(rng, true_stance),
        sentiment=_noisy_sentiment(rng, true_sentiment),
    )


def _decoy_text(rng: np.random.Generator, kind: int) -> str:
    base = " ".join(_sample(rng, _FILLER, 3) + _sample(rng, _TOPIC, 1))
    if kind == 0:
        return f"RT @user{rng.integers(1, 99)}: {base}"
    if kind == 1:
        return f"zie https://nieuws.example/{rng.integers(100, 999)} {base}"
    blacklisted = ("dierenarts", "landbouwgif", "teek")
    return f"{base} {blacklisted[rng.integers(0, 3)]}"


def generate_corpus(
    seed: int = DEFAULT_SEED, size: int = DEFAULT_SIZE
) -> tuple[list[Tweet], list[AnnotationRecord]]:
    """Build the synthetic corpus: annotated tweets plus unannotated decoys.

    Deterministic per (seed, size); annotations reference only non-decoy
    tweets, so the corpus can be filtered before aggregation.
    """
    rng = np.random.default_rng(seed)
    annotators = [f"ann{i:02d}" for i in range(1, _N_ANNOTATORS + 1)]
    tweets: list[Tweet] = []
    records: list[AnnotationRecord] = []

    for i in range(size):
        tweet_id = f"t{i:06d}"
        true_stance = _pick(rng, _STANCE_MIX)
        markers, phrase = _true_markers(rng, true_stance)
        text = _compose_text(rng, markers, phrase)
        tweets.append(Tweet(id=tweet_id, text=text))
        true_sentiment = (
            _pick(rng, _SENTIMENT_MIX[true_stance]) if true_stance else None
        )
        n_annotations = 2 if rng.random() < _DOUBLE_ANNOTATION_RATE else 1
        chosen = _sample(rng, annotators, n_annotations)
        for annotator in chosen:
            records.append(
                _annotate(rng, tweet_id, true_stance, true_sentiment, annotator)
            )

    n_decoys = max(1, size // 20)
    for i in range(n_decoys):
        tweets.append(
            Tweet(id=f"d{i:06d}", text=_decoy_text(rng, int(rng.integers(0, 3))))
        )
    order = rng.permutation(len(tweets))
    return [tweets[i] for i in order], records


def write_corpus(
    out_dir: str | Path, seed: int = DEFAULT_SEED, size: int = DEFAULT_SIZE
) -> tuple[Path, Path]:
    """Materialize tweets.jsonl and annotations.csv under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tweets, records = generate_corpus(seed=seed, size=size)
    tweets_path = out_dir / "tweets.jsonl"
    annotations_path = out_dir / "annotations.csv"
    save_corpus(tweets, tweets_path)
    save_annotations(records, annotations_path)
    return tweets_path, annotations_path
