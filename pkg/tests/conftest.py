import pytest

from maskgec.oracle import MaskResponse, Oracle, UniformOracle, train_ngram_oracle
from maskgec.registry import load_bundled_registry, load_confusion_sets


class RecordingOracle(Oracle):
    """Pass-through wrapper that records every wire batch it sees."""

    def __init__(self, inner):
        self.inner = inner
        self.batches = []

    def query(self, batch):
        self.batches.append(list(batch))
        return self.inner.query(batch)

    @property
    def queries(self):
        return [q for batch in self.batches for q in batch]

    @property
    def point_queries(self):
        return sum(len(q.masked_positions) for q in self.queries)

    def reset(self):
        self.batches = []


class ShiftedOracle(Oracle):
    """Adds a constant to every logprob of the wrapped oracle."""

    def __init__(self, inner, shift):
        self.inner = inner
        self.shift = shift

    def query(self, batch):
        return [
            MaskResponse(tuple(lp + self.shift for lp in r.logprobs))
            for r in self.inner.query(batch)
        ]


@pytest.fixture(scope="session")
def tagalog():
    return load_bundled_registry("tagalog")


@pytest.fixture(scope="session")
def tiny_registry():
    return load_confusion_sets(
        "animal: cat, dog, bird\n"
        "verb: runs, sits\n"
    )


@pytest.fixture
def uniform10():
    return UniformOracle(10)


TINY_TRAINING = "\n".join(
    [
        "the cat runs fast",
        "the dog sits down",
        "a cat sits down",
        "the bird runs away",
        "a dog runs fast",
    ]
)


@pytest.fixture(scope="session")
def tiny_ngram():
    return train_ngram_oracle(TINY_TRAINING)
