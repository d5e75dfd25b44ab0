"""Synthetic corpora with controllable label separability.

Each label gets an orthogonal prototype direction; a document's vector is
the sum of its gold prototypes plus Gaussian noise.  With small noise the
true-label similarities (at least 1/sqrt(max labels per doc)) sit far above
the near-zero non-true similarities, so calibrated thresholding is nearly
perfect.

Per-label contamination is injected on top: for a fraction of the documents
NOT carrying a label, the label's prototype is added to the vector while the
gold set stays unchanged.  Those documents become indistinguishable from
true positives, the alpha/beta distributions overlap, and the label's
achievable F1 degrades in proportion — the knob used to study the
overlap-versus-F1 relationship.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, Document, EmbeddingMatrix, LabelCatalog, ValidationError


def make_corpus(
    n_docs: int = 400,
    n_labels: int = 8,
    seed: int = 0,
    noise: float = 0.02,
    max_labels_per_doc: int = 3,
    overlap=None,
    dim: int | None = None,
):
    """Build (dataset, text embeddings, label embeddings).

    ``overlap`` is None or a per-label sequence of fractions in [0, 1): the
    share of each label's negative documents that receive its prototype as
    contamination.  ``dim`` defaults to ``n_labels`` (prototypes are basis
    vectors); larger values pad with zero coordinates that only noise fills.
    """
    if n_docs < 1 or n_labels < 1:
        raise ValidationError("need at least one document and one label")
    if not 1 <= max_labels_per_doc <= n_labels:
        raise ValidationError(
            f"max_labels_per_doc must be in [1, {n_labels}], got {max_labels_per_doc}"
        )
    dim = dim or n_labels
    if dim < n_labels:
        raise ValidationError(f"dim must be >= n_labels, got {dim} < {n_labels}")
    if overlap is not None:
        overlap = [float(o) for o in overlap]
        if len(overlap) != n_labels:
            raise ValidationError(
                f"overlap needs one fraction per label, got {len(overlap)}"
            )
        if any(not 0.0 <= o < 1.0 for o in overlap):
            raise ValidationError("overlap fractions must be in [0, 1)")

    rng = np.random.default_rng(seed)
    names = tuple(f"topic{j:02d}" for j in range(n_labels))
    prototypes = np.zeros((n_labels, dim))
    prototypes[:, :n_labels] = np.eye(n_labels)

    gold_sets = []
    vectors = np.zeros((n_docs, dim))
    for i in range(n_docs):
        k = int(rng.integers(1, max_labels_per_doc + 1))
        chosen = rng.choice(n_labels, size=k, replace=False)
        gold_sets.append(frozenset(names[j] for j in chosen))
        vectors[i] = prototypes[chosen].sum(axis=0)
    vectors += noise * rng.standard_normal((n_docs, dim))

    if overlap is not None:
        for j in range(n_labels):
            if overlap[j] == 0.0:
                continue
            negatives = [i for i in range(n_docs) if names[j] not in gold_sets[i]]
            count = int(np.floor(overlap[j] * len(negatives)))
            if count == 0:
                continue
            contaminated = rng.choice(len(negatives), size=count, replace=False)
            for idx in contaminated:
                vectors[negatives[idx]] += prototypes[j]

    docs = [
        Document(id=f"d{i:04d}", text=f"synthetic document {i}", gold_labels=gold_sets[i])
        for i in range(n_docs)
    ]
    catalog = LabelCatalog.from_names(names)
    dataset = Dataset(docs, catalog)
    texts = EmbeddingMatrix(dataset.ids, vectors)
    labels = EmbeddingMatrix(names, prototypes)
    return dataset, texts, labels
