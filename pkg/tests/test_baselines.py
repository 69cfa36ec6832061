import math

import numpy as np
import pytest

from stancemon.baselines import (
    PolarityLexicon,
    ThresholdRule,
    lexicon_classify,
    lexicon_score,
    load_demo_lexicon,
    load_lexicon,
    random_baseline,
    tune_threshold,
)
from stancemon.errors import DataFormatError
from stancemon.features import tokenize


LEX = PolarityLexicon(
    unigrams={"goed": 0.5, "slecht": -0.7, "eng": -0.6, "top": 0.9},
    bigrams={("horribly", "good"): 0.9, ("niet", "goed"): -0.6},
)


class TestLexiconScore:
    def test_single_adjective(self):
        assert lexicon_score(tokenize("dit is goed"), LEX) == pytest.approx(0.5)

    def test_no_match_is_zero(self):
        assert lexicon_score(tokenize("niets hier"), LEX) == 0.0

    def test_bigram_counts_once(self):
        score = lexicon_score(tokenize("horribly good"), LEX)
        assert score == pytest.approx(0.9)

    def test_bigram_consumes_both_tokens(self):
        # "niet goed" must not also contribute the "goed" unigram.
        assert lexicon_score(tokenize("dat is niet goed"), LEX) == pytest.approx(-0.6)

    def test_product_of_matches(self):
        score = lexicon_score(tokenize("slecht en eng"), LEX)
        assert score == pytest.approx(-0.7 * -0.6)

    def test_clamped(self):
        big = PolarityLexicon(unigrams={"heel": -1.0, "erg": -1.0, "raar": -1.0}, bigrams={})
        assert lexicon_score(tokenize("heel erg raar"), big) == -1.0

    def test_order_independent_without_bigrams(self):
        lex = PolarityLexicon(unigrams={"a": 0.5, "b": -0.4, "c": 0.8}, bigrams={})
        assert lexicon_score(tokenize("a b c"), lex) == pytest.approx(
            lexicon_score(tokenize("c a b"), lex)
        )

    def test_entries_validated(self):
        with pytest.raises(ValueError):
            PolarityLexicon(unigrams={"Te": 0.5}, bigrams={})
        with pytest.raises(ValueError):
            PolarityLexicon(unigrams={"x": 1.5}, bigrams={})


class TestTuneThreshold:
    def test_midpoint_cut(self):
        scored = [(-0.9, True), (-0.8, True), (0.5, False)]
        rule = tune_threshold(scored)
        assert rule.negative_below == pytest.approx((-0.8 + 0.5) / 2)
        assert rule.positive_above == 0.0

    def test_all_scores_identical(self):
        scored = [(0.3, True), (0.3, False), (0.3, True)]
        rule = tune_threshold(scored)
        # only the infinities are candidates; +inf flags everything (F1 > 0)
        assert rule.negative_below == math.inf

    def test_perfectly_separable_reaches_f1_one(self):
        scored = [(-0.5, True)] * 4 + [(0.4, False)] * 6
        rule = tune_threshold(scored)
        predicted = [score < rule.negative_below for score, _ in scored]
        assert predicted == [really for _, really in scored]

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            tune_threshold([(0.1, True), (0.2, True)])

    def test_beats_every_candidate_cut(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            n = int(rng.integers(4, 60))
            scored = [
                (round(float(rng.normal()), 2), bool(rng.random() < 0.3)) for _ in range(n)
            ]
            if len({b for _, b in scored}) < 2:
                continue
            rule = tune_threshold(scored)

            def f1_at(cut):
                tp = sum(1 for s, b in scored if s < cut and b)
                fp = sum(1 for s, b in scored if s < cut and not b)
                fn = sum(1 for s, b in scored if not s < cut and b)
                if tp == 0:
                    return 0.0
                precision, recall = tp / (tp + fp), tp / (tp + fn)
                return 2 * precision * recall / (precision + recall)

            best = f1_at(rule.negative_below)
            distinct = sorted({s for s, _ in scored})
            cuts = (
                [-math.inf]
                + [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]
                + [math.inf]
            )
            assert best >= max(f1_at(c) for c in cuts) - 1e-12

    def test_rule_invariant_holds_when_cut_positive(self):
        # negatives scoring high: the best cut is above zero
        scored = [(0.8, True), (0.9, True), (-0.5, False)]
        rule = tune_threshold(scored)
        assert rule.negative_below <= rule.positive_above


class TestLexiconClassify:
    RULE = ThresholdRule(negative_below=-0.1, positive_above=0.1)

    def test_negative(self):
        assert lexicon_classify(-0.5, self.RULE) == "Negative"

    def test_neutral(self):
        assert lexicon_classify(0.0, self.RULE) == "Neutral"

    def test_positive(self):
        assert lexicon_classify(0.5, self.RULE) == "Positive"

    def test_rule_validation(self):
        with pytest.raises(ValueError):
            ThresholdRule(negative_below=0.5, positive_above=0.1)


class TestRandomBaseline:
    def test_p_zero(self):
        assert random_baseline(100, 0.0, seed=1) == [False] * 100

    def test_p_one(self):
        assert random_baseline(100, 1.0, seed=1) == [True] * 100

    def test_law_of_large_numbers(self):
        flags = random_baseline(100_000, 0.15, seed=5)
        assert abs(sum(flags) / len(flags) - 0.15) < 0.005

    def test_reproducible_per_seed(self):
        assert random_baseline(50, 0.4, seed=9) == random_baseline(50, 0.4, seed=9)
        assert random_baseline(50, 0.4, seed=9) != random_baseline(50, 0.4, seed=10)

    def test_precision_tracks_base_rate_and_recall_tracks_p(self):
        rng = np.random.default_rng(2)
        n = 100_000
        base_rate = 0.2
        gold = rng.random(n) < base_rate
        flags = np.array(random_baseline(n, 0.5, seed=3))
        tp = int((gold & flags).sum())
        precision = tp / int(flags.sum())
        recall = tp / int(gold.sum())
        assert abs(precision - base_rate) < 0.01
        assert abs(recall - 0.5) < 0.01

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            random_baseline(10, 1.5, seed=0)


class TestLexiconIO:
    def test_load_tsv(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text(
            "# comment\ngoed\t0.6\nniet goed\t-0.6\n\n", encoding="utf-8"
        )
        lex = load_lexicon(path)
        assert lex.unigrams == {"goed": 0.6}
        assert lex.bigrams == {("niet", "goed"): -0.6}

    def test_bad_polarity_reports_line(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("goed\tveel\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="line 1"):
            load_lexicon(path)

    def test_out_of_range_polarity(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("goed\t2.0\n", encoding="utf-8")
        with pytest.raises(DataFormatError):
            load_lexicon(path)

    def test_demo_lexicon_loads(self):
        lex = load_demo_lexicon()
        assert lex.unigrams["gif"] < 0 < lex.unigrams["goed"]
        assert ("niet", "goed") in lex.bigrams
