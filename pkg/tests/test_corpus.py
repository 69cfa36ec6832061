import numpy as np
import pytest

from stancemon.corpus import (
    DEFAULT_BLACKLIST,
    FilterConfig,
    FilterReport,
    Tweet,
    apply_filters,
    load_corpus,
    save_corpus,
)
from stancemon.errors import DataFormatError


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCorpus:
    def test_three_valid_records_in_order(self, tmp_path):
        path = _write(
            tmp_path / "t.jsonl",
            '{"id": "1", "text": "een"}\n'
            '{"id": "2", "text": "twee"}\n'
            '{"id": "3", "text": "drie"}\n',
        )
        tweets = load_corpus(path)
        assert [t.id for t in tweets] == ["1", "2", "3"]
        assert [t.text for t in tweets] == ["een", "twee", "drie"]

    def test_empty_file(self, tmp_path):
        assert load_corpus(_write(tmp_path / "t.jsonl", "")) == []

    def test_duplicate_id_names_the_id_and_line(self, tmp_path):
        path = _write(
            tmp_path / "t.jsonl",
            '{"id": "1", "text": "a"}\n'
            '{"id": "42", "text": "b"}\n'
            '{"id": "2", "text": "c"}\n'
            '{"id": "3", "text": "d"}\n'
            '{"id": "42", "text": "e"}\n',
        )
        with pytest.raises(DataFormatError, match=r"line 5.*'42'"):
            load_corpus(path)

    def test_missing_required_field(self, tmp_path):
        path = _write(tmp_path / "t.jsonl", '{"id": "1"}\n')
        with pytest.raises(DataFormatError, match="text"):
            load_corpus(path)

    def test_parse_failure_reports_line(self, tmp_path):
        path = _write(tmp_path / "t.jsonl", '{"id": "1", "text": "a"}\n{nope\n')
        with pytest.raises(DataFormatError, match="line 2"):
            load_corpus(path)

    def test_csv_roundtrip_of_fields(self, tmp_path):
        path = _write(
            tmp_path / "t.csv",
            'id,text,timestamp,is_retweet,query_term\n'
            '1,"vaccinatie, zei ze",2020-01-01T00:00:00Z,true,vaccin\n'
            "2,prik,,false,\n",
        )
        tweets = load_corpus(path, format="csv")
        assert tweets[0].text == "vaccinatie, zei ze"
        assert tweets[0].is_retweet is True
        assert tweets[1].is_retweet is False
        assert tweets[1].query_term is None

    def test_jsonl_roundtrip(self, tmp_path):
        tweets = [Tweet(id="1", text="hoi"), Tweet(id="2", text="daar", is_retweet=True)]
        path = tmp_path / "out.jsonl"
        save_corpus(tweets, path)
        assert load_corpus(path) == tweets

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            load_corpus(_write(tmp_path / "x", ""), format="xml")


class TestTweetInvariants:
    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            Tweet(id="", text="x")

    def test_whitespace_text_rejected(self):
        with pytest.raises(ValueError):
            Tweet(id="1", text="  \n ")


class TestApplyFilters:
    def test_retweet_removed(self):
        tweets = [
            Tweet(id="1", text="RT @x vaccinatie is top"),
            Tweet(id="2", text="vaccinatie is top"),
        ]
        kept, report = apply_filters(tweets, FilterConfig())
        assert [t.id for t in kept] == ["2"]
        assert report.before == 2
        assert report.after_retweets == 1

    def test_retweet_flag_and_case(self):
        tweets = [
            Tweet(id="1", text="gewoon bericht", is_retweet=True),
            Tweet(id="2", text="rt @iemand lekker dan"),
        ]
        kept, _ = apply_filters(tweets, FilterConfig(blacklist=()))
        assert kept == []

    def test_url_removed(self):
        tweets = [Tweet(id="1", text="zie https://nos.nl over vaccin")]
        kept, report = apply_filters(tweets, FilterConfig())
        assert kept == []
        assert report.after_urls == 0

    def test_url_prefixes(self):
        for text in ("http://a", "https://b", "kijk www.nu.nl dan"):
            kept, _ = apply_filters([Tweet(id="1", text=text)], FilterConfig(blacklist=()))
            assert kept == [], text
        # "www." with nothing after it is not a URL
        kept, _ = apply_filters([Tweet(id="1", text="www. nl")], FilterConfig(blacklist=()))
        assert len(kept) == 1

    def test_blacklist_substring(self):
        tweets = [
            Tweet(id="1", text="teek vaccin voor honden"),
            Tweet(id="2", text="vaccin voor kinderen"),
        ]
        kept, _ = apply_filters(tweets, FilterConfig(blacklist=("teek",)))
        assert [t.id for t in kept] == ["2"]

    def test_blacklist_matches_inside_words(self):
        kept, _ = apply_filters(
            [Tweet(id="1", text="landbouwgif in het nieuws")], FilterConfig()
        )
        assert kept == []

    def test_disabled_filters_pass_everything(self):
        tweets = [
            Tweet(id="1", text="RT @x met http://url en dierenleed"),
            Tweet(id="2", text="gewoon"),
        ]
        config = FilterConfig(remove_retweets=False, remove_urls=False, blacklist=())
        kept, report = apply_filters(tweets, config)
        assert kept == tweets
        assert report.before == report.after_blacklist == 2

    def test_idempotent_and_monotone(self):
        rng = np.random.default_rng(3)
        pieces = ["RT @a", "https://x", "dier", "vaccin", "prik werkt", "www.nu.nl", "ok"]
        tweets = [
            Tweet(id=str(i), text=" ".join(rng.choice(pieces, size=3)))
            for i in range(200)
        ]
        config = FilterConfig()
        kept, report = apply_filters(tweets, config)
        again, report2 = apply_filters(kept, config)
        assert again == kept
        assert report2.before == report2.after_blacklist == len(kept)
        assert (
            report.before >= report.after_retweets >= report.after_urls
            >= report.after_blacklist
        )


class TestConfigValidation:
    def test_blacklist_must_be_lowercase(self):
        with pytest.raises(ValueError):
            FilterConfig(blacklist=("Dier",))

    def test_report_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            FilterReport(before=1, after_retweets=2, after_urls=0, after_blacklist=0)

    def test_default_blacklist(self):
        assert DEFAULT_BLACKLIST == ("dier", "landbouw", "teek")
