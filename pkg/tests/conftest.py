import numpy as np
import pytest

from simthresh import (
    Dataset,
    Document,
    EmbeddingMatrix,
    LabelCatalog,
    LabelSpec,
    SimilarityMatrix,
)


@pytest.fixture
def small_catalog():
    return LabelCatalog([
        LabelSpec(name="alpha", adjusted_name="alpha topic",
                  keywords=("one", "two", "three")),
        LabelSpec(name="beta", keywords=("four", "five")),
        LabelSpec(name="gamma", adjusted_name="gamma topic",
                  keywords=("six", "seven", "eight", "nine")),
    ])


@pytest.fixture
def small_dataset(small_catalog):
    docs = [
        Document(id="d1", text="first", gold_labels=frozenset({"alpha"})),
        Document(id="d2", text="second", gold_labels=frozenset({"alpha", "beta"})),
        Document(id="d3", text="third", gold_labels=frozenset({"gamma"})),
        Document(id="d4", text="fourth", gold_labels=frozenset()),
    ]
    return Dataset(docs, small_catalog)


def random_instance(rng, m=None, n=None, ensure_positive=True):
    """A random similarity matrix with random gold sets over generic labels.

    Returns (SimilarityMatrix, Dataset).  With ensure_positive, at least one
    document carries at least one label so calibration is well defined.
    """
    m = m if m is not None else int(rng.integers(3, 51))
    n = n if n is not None else int(rng.integers(1, 6))
    names = [f"l{j}" for j in range(n)]
    catalog = LabelCatalog.from_names(names)
    values = rng.uniform(0.0, 1.0, size=(m, n))
    gold_rows = (rng.uniform(size=(m, n)) < 0.35)
    if ensure_positive and not gold_rows.any():
        gold_rows[int(rng.integers(m)), int(rng.integers(n))] = True
    docs = []
    for i in range(m):
        labels = frozenset(names[j] for j in range(n) if gold_rows[i, j])
        docs.append(Document(id=f"t{i}", text="", gold_labels=labels))
    dataset = Dataset(docs, catalog)
    sims = SimilarityMatrix("cosine", values, dataset.ids, names)
    return sims, dataset


def embedding_fixture(rng, m=6, dim=4, prefix="e"):
    ids = [f"{prefix}{i}" for i in range(m)]
    return EmbeddingMatrix(ids, rng.standard_normal((m, dim)))
