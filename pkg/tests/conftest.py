import pytest

from stancemon.annotation import SCHEMES, aggregate
from stancemon.synthetic import generate_corpus


@pytest.fixture(scope="session")
def small_corpus():
    """400 annotated tweets plus decoys; enough for fast CV at k=5."""
    tweets, records = generate_corpus(seed=7, size=400)
    return tweets, records


@pytest.fixture(scope="session")
def small_polarity_dataset(small_corpus):
    tweets, records = small_corpus
    index = {t.id: t for t in tweets}
    return aggregate(records, index, SCHEMES["polarity"])
