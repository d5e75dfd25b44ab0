"""Stratified splitting, exact-size subsampling, and the learning curve."""

import numpy as np
import pytest

from simthresh import (
    Dataset,
    Document,
    LabelCatalog,
    ValidationError,
    calibrate_label_specific,
    evaluate,
    iterative_stratified_split,
    learning_curve,
    make_corpus,
    predict,
    similarity_matrix,
    subsample_stratified,
)


def _single_label_dataset(counts):
    """counts: {label: how many documents carry exactly that label}."""
    catalog = LabelCatalog.from_names(sorted(counts))
    docs = []
    i = 0
    for name in sorted(counts):
        for _ in range(counts[name]):
            docs.append(Document(id=f"d{i:03d}", text="", gold_labels=frozenset({name})))
            i += 1
    return Dataset(docs, catalog)


def _label_counts(dataset):
    counts = {name: 0 for name in dataset.catalog.names}
    for doc in dataset:
        for label in doc.gold_labels:
            counts[label] += 1
    return counts


class TestIterativeStratifiedSplit:
    def test_sizes_follow_fractions(self):
        dataset = _single_label_dataset({"a": 10})
        parts = iterative_stratified_split(dataset, [0.9, 0.1], seed=1)
        assert [len(p) for p in parts] == [9, 1]

    def test_exact_proportionality_on_integral_targets(self):
        dataset = _single_label_dataset({"a": 40, "b": 30, "c": 20, "d": 10})
        parts = iterative_stratified_split(dataset, [0.8, 0.2], seed=2)
        assert _label_counts(parts[0]) == {"a": 32, "b": 24, "c": 16, "d": 8}
        assert _label_counts(parts[1]) == {"a": 8, "b": 6, "c": 4, "d": 2}

    def test_rare_label_kept_proportional(self):
        # 10 of 100 documents carry b; a 90/10 split must give 9 and 1
        docs = []
        for i in range(100):
            labels = {"a", "b"} if i < 10 else {"a"}
            docs.append(Document(id=f"d{i:03d}", text="", gold_labels=frozenset(labels)))
        dataset = Dataset(docs, LabelCatalog.from_names(["a", "b"]))
        parts = iterative_stratified_split(dataset, [0.9, 0.1], seed=3)
        assert _label_counts(parts[0])["b"] == 9
        assert _label_counts(parts[1])["b"] == 1

    def test_partition_property(self):
        rng = np.random.default_rng(71)
        dataset, _, _ = make_corpus(n_docs=97, n_labels=6, seed=int(rng.integers(1000)))
        parts = iterative_stratified_split(dataset, [0.5, 0.3, 0.2], seed=4)
        all_ids = [d for p in parts for d in p.ids]
        assert sorted(all_ids) == sorted(dataset.ids)
        assert len(set(all_ids)) == len(dataset)

    def test_same_seed_reproduces_partition(self):
        dataset, _, _ = make_corpus(n_docs=150, n_labels=7, seed=9)
        first = iterative_stratified_split(dataset, [0.7, 0.3], seed=5)
        second = iterative_stratified_split(dataset, [0.7, 0.3], seed=5)
        assert [p.ids for p in first] == [p.ids for p in second]

    def test_unlabeled_documents_fill_remaining_capacity(self):
        docs = [Document(id=f"d{i}", text="", gold_labels=frozenset()) for i in range(10)]
        dataset = Dataset(docs, LabelCatalog.from_names(["a"]))
        parts = iterative_stratified_split(dataset, [0.6, 0.4], seed=6)
        assert sorted(len(p) for p in parts) == [4, 6]

    def test_fraction_validation(self):
        dataset = _single_label_dataset({"a": 4})
        with pytest.raises(ValidationError, match="sum to 1"):
            iterative_stratified_split(dataset, [0.5, 0.3], seed=0)
        with pytest.raises(ValidationError, match="positive"):
            iterative_stratified_split(dataset, [1.5, -0.5], seed=0)

    def test_empty_dataset_rejected(self):
        dataset = Dataset([], LabelCatalog.from_names(["a"]))
        with pytest.raises(ValidationError, match="empty"):
            iterative_stratified_split(dataset, [0.5, 0.5], seed=0)


class TestSubsampleStratified:
    def test_full_size_is_identity(self):
        dataset, _, _ = make_corpus(n_docs=40, n_labels=4, seed=11)
        sub = subsample_stratified(dataset, 40, seed=1)
        assert sub.ids == dataset.ids

    def test_single_document(self):
        dataset, _, _ = make_corpus(n_docs=40, n_labels=4, seed=12)
        sub = subsample_stratified(dataset, 1, seed=1)
        assert len(sub) == 1

    def test_exact_size_for_awkward_fractions(self):
        dataset, _, _ = make_corpus(n_docs=886, n_labels=11, seed=13)
        for size in (10, 50, 100, 333):
            sub = subsample_stratified(dataset, size, seed=2)
            assert len(sub) == size

    def test_label_proportions_close_to_global(self):
        dataset, _, _ = make_corpus(n_docs=886, n_labels=11, seed=14)
        global_counts = _label_counts(dataset)
        size = 50
        sub = subsample_stratified(dataset, size, seed=3)
        sub_counts = _label_counts(sub)
        for name in dataset.catalog.names:
            expected = global_counts[name] * size / len(dataset)
            assert abs(sub_counts[name] - expected) <= 2.0

    def test_deterministic(self):
        dataset, _, _ = make_corpus(n_docs=120, n_labels=5, seed=15)
        a = subsample_stratified(dataset, 37, seed=4)
        b = subsample_stratified(dataset, 37, seed=4)
        assert a.ids == b.ids

    def test_out_of_range_rejected(self):
        dataset, _, _ = make_corpus(n_docs=10, n_labels=3, seed=16)
        with pytest.raises(ValidationError, match="size must be"):
            subsample_stratified(dataset, 0, seed=0)
        with pytest.raises(ValidationError, match="size must be"):
            subsample_stratified(dataset, 11, seed=0)


def _pipeline_fixture(seed=20):
    dataset, texts, labels = make_corpus(n_docs=160, n_labels=5, seed=seed)
    val, test = iterative_stratified_split(dataset, [0.5, 0.5], seed=seed)
    sims = similarity_matrix(texts, labels, "cosine")
    return (
        sims.select_texts(val.ids), val,
        sims.select_texts(test.ids), test,
    )


class TestLearningCurve:
    def test_full_size_point_reproduces_standard_pipeline(self):
        sims_val, val, sims_test, test = _pipeline_fixture()
        result = learning_curve(
            sims_val, val, sims_test, test, sizes=[len(val)], repeats=1, base_seed=7
        )
        profile = calibrate_label_specific(sims_val, val)
        report = evaluate(predict(sims_test, profile), test, sims=sims_test)
        point = result.points[0]
        assert point.ok
        assert point.macro_f1 == report.macro_f1
        assert point.micro_f1 == report.micro_f1
        assert point.p_at_1 == report.p_at_1
        assert point.thresholds == profile.per_label

    def test_deterministic_under_fixed_base_seed(self):
        sims_val, val, sims_test, test = _pipeline_fixture()
        kwargs = dict(sizes=[10, 25], repeats=3, base_seed=21)
        first = learning_curve(sims_val, val, sims_test, test, **kwargs)
        second = learning_curve(sims_val, val, sims_test, test, **kwargs)
        assert first == second

    def test_seed_schedule_separates_cells(self):
        sims_val, val, sims_test, test = _pipeline_fixture()
        result = learning_curve(
            sims_val, val, sims_test, test, sizes=[10, 25], repeats=2, base_seed=100
        )
        seeds = [(p.size, p.repeat, p.seed) for p in result.points]
        assert seeds == [
            (10, 0, 100), (10, 1, 101), (25, 0, 1100), (25, 1, 1101),
        ]

    def test_uniform_reference_present(self):
        sims_val, val, sims_test, test = _pipeline_fixture()
        result = learning_curve(
            sims_val, val, sims_test, test, sizes=[20], repeats=1, base_seed=8
        )
        assert 0.0 <= result.reference["macro_f1"] <= 1.0
        assert "theta" in result.reference

    def test_separable_data_beats_uniform_reference_at_modest_size(self):
        sims_val, val, sims_test, test = _pipeline_fixture(seed=23)
        result = learning_curve(
            sims_val, val, sims_test, test, sizes=[60], repeats=5, base_seed=9
        )
        for point in result.points:
            assert point.ok
            assert point.macro_f1 >= result.reference["macro_f1"] - 1e-12

    def test_point_without_positives_recorded_as_failed(self):
        # one labeled document among twenty: a size-2 subsample keeps none
        docs = [
            Document(id=f"d{i:02d}", text="",
                     gold_labels=frozenset({"a"}) if i == 0 else frozenset())
            for i in range(20)
        ]
        catalog = LabelCatalog.from_names(["a"])
        val = Dataset(docs, catalog)
        rng = np.random.default_rng(77)
        values = rng.uniform(0, 1, size=(20, 1))
        from simthresh import SimilarityMatrix

        sims_val = SimilarityMatrix("cosine", values, val.ids, ["a"])
        result = learning_curve(
            sims_val, val, sims_val, val, sizes=[2], repeats=1, base_seed=3
        )
        point = result.points[0]
        assert not point.ok
        assert "positive" in point.reason
        assert point.positives == {"a": 0}

    def test_default_sizes_capped_at_validation_size(self):
        sims_val, val, sims_test, test = _pipeline_fixture()
        result = learning_curve(sims_val, val, sims_test, test, repeats=1, base_seed=5)
        sizes = sorted({p.size for p in result.points})
        assert sizes[-1] == len(val)
        assert all(s <= len(val) for s in sizes)
