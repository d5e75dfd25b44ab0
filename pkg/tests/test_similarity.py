"""Scalar metrics, the pairwise matrix, normalization, and the cache formats."""

import math

import numpy as np
import pytest

from simthresh import (
    EmbeddingMatrix,
    SimilarityMatrix,
    ValidationError,
    cosine,
    euclidean,
    load_similarity,
    minmax_normalize,
    save_similarity_binary,
    save_similarity_jsonl,
    similarity_matrix,
)
from simthresh.similarity import load_similarity_binary, load_similarity_jsonl


class TestCosine:
    def test_identity_direction(self):
        assert cosine([1, 0], [1, 0]) == 1.0

    def test_orthogonality(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_hand_oracle(self):
        # dot([1,2,3],[4,5,6]) = 32; norms sqrt(14), sqrt(77)
        expected = 32.0 / math.sqrt(14 * 77)
        assert abs(cosine([1, 2, 3], [4, 5, 6]) - expected) < 1e-12
        assert abs(expected - 0.974632) < 1e-6

    def test_self_similarity_is_one(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = rng.standard_normal(int(rng.integers(2, 40)))
            assert abs(cosine(x, x) - 1.0) < 1e-9

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            x = rng.standard_normal(8)
            y = rng.standard_normal(8)
            assert cosine(x, y) == cosine(y, x)

    def test_clamped_to_unit_interval(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            x = rng.standard_normal(5) * 1e8
            y = rng.standard_normal(5) * 1e-8
            assert -1.0 <= cosine(x, y) <= 1.0

    def test_zero_norm_rejected(self):
        with pytest.raises(ValidationError, match="zero-norm"):
            cosine([0, 0], [1, 0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            cosine([1, 2], [1, 2, 3])


class TestEuclidean:
    def test_zero_for_identical(self):
        assert euclidean([1.5, -2.0, 3.0], [1.5, -2.0, 3.0]) == 0.0

    def test_three_four_five(self):
        assert euclidean([0, 0], [3, 4]) == 5.0

    def test_hand_oracle(self):
        assert abs(euclidean([1, 2, 3], [4, 5, 6]) - math.sqrt(27)) < 1e-12

    def test_triangle_inequality(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            a, b, c = rng.standard_normal((3, 6))
            assert euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-9


class TestSimilarityMatrix:
    def test_single_row(self):
        texts = EmbeddingMatrix(["t"], [[1.0, 0.0]])
        labels = EmbeddingMatrix(["a", "b"], [[1.0, 0.0], [0.0, 1.0]])
        sims = similarity_matrix(texts, labels, "cosine")
        np.testing.assert_array_equal(sims.values, [[1.0, 0.0]])

    def test_empty_text_set(self):
        texts = EmbeddingMatrix([], np.zeros((0, 3)))
        labels = EmbeddingMatrix(["a"], [[1.0, 0.0, 0.0]])
        sims = similarity_matrix(texts, labels, "cosine")
        assert sims.shape == (0, 1)

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(9)
        texts = EmbeddingMatrix([f"t{i}" for i in range(5)], rng.standard_normal((5, 8)))
        labels = EmbeddingMatrix([f"l{j}" for j in range(3)], rng.standard_normal((3, 8)))
        for metric, fn in (("cosine", cosine), ("euclidean", euclidean)):
            sims = similarity_matrix(texts, labels, metric)
            oracle = np.array([
                [fn(texts.matrix[i], labels.matrix[j]) for j in range(3)]
                for i in range(5)
            ])
            np.testing.assert_allclose(sims.values, oracle, atol=1e-9, rtol=0)

    def test_thread_count_does_not_change_values(self):
        rng = np.random.default_rng(10)
        texts = EmbeddingMatrix([f"t{i}" for i in range(40)], rng.standard_normal((40, 16)))
        labels = EmbeddingMatrix([f"l{j}" for j in range(7)], rng.standard_normal((7, 16)))
        for metric in ("cosine", "euclidean"):
            serial = similarity_matrix(texts, labels, metric, threads=1)
            threaded = similarity_matrix(texts, labels, metric, threads=4)
            np.testing.assert_array_equal(serial.values, threaded.values)

    def test_zero_norm_row_names_offender(self):
        texts = EmbeddingMatrix(["ok", "broken"], [[1.0, 0.0], [0.0, 0.0]])
        labels = EmbeddingMatrix(["a"], [[1.0, 0.0]])
        with pytest.raises(ValidationError, match="broken"):
            similarity_matrix(texts, labels, "cosine")
        # the same input is fine under euclidean
        sims = similarity_matrix(texts, labels, "euclidean")
        assert sims.shape == (2, 1)

    def test_dimension_mismatch_rejected(self):
        texts = EmbeddingMatrix(["t"], [[1.0, 0.0]])
        labels = EmbeddingMatrix(["a"], [[1.0, 0.0, 0.0]])
        with pytest.raises(ValidationError, match="dimensions differ"):
            similarity_matrix(texts, labels, "cosine")


class TestMinMaxNormalize:
    def _matrix(self, values):
        values = np.asarray(values, dtype=np.float64)
        m, n = values.shape
        return SimilarityMatrix(
            "cosine", values,
            [f"t{i}" for i in range(m)], [f"l{j}" for j in range(n)],
        )

    def test_three_point_example(self):
        out = minmax_normalize(self._matrix([[0.2, 0.5, 0.8]]))
        np.testing.assert_allclose(out.values, [[0.0, 0.5, 1.0]], atol=1e-15)
        assert out.normalized

    def test_signed_range(self):
        out = minmax_normalize(self._matrix([[-1.0, 0.0, 1.0]]))
        np.testing.assert_allclose(out.values, [[0.0, 0.5, 1.0]], atol=1e-15)

    def test_constant_matrix_maps_to_zero(self):
        out = minmax_normalize(self._matrix([[0.3, 0.3], [0.3, 0.3]]))
        np.testing.assert_array_equal(out.values, np.zeros((2, 2)))

    def test_normalization_is_global_not_per_label(self):
        out = minmax_normalize(self._matrix([[0.0, 0.5], [0.25, 1.0]]))
        np.testing.assert_allclose(out.values, [[0.0, 0.5], [0.25, 1.0]], atol=1e-15)

    def test_idempotent_on_nonconstant(self):
        rng = np.random.default_rng(12)
        once = minmax_normalize(self._matrix(rng.uniform(-1, 1, size=(20, 6))))
        twice = minmax_normalize(once)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-12)

    def test_order_preserving(self):
        rng = np.random.default_rng(13)
        raw = rng.standard_normal((50, 4))
        out = minmax_normalize(self._matrix(raw)).values
        order = np.argsort(raw.ravel(), kind="stable")
        assert np.all(np.diff(out.ravel()[order]) >= 0.0)

    def test_min_and_max_hit_bounds_exactly(self):
        rng = np.random.default_rng(14)
        out = minmax_normalize(self._matrix(rng.uniform(0.2, 0.9, (30, 5)))).values
        assert out.min() == 0.0
        assert out.max() == 1.0


class TestPersistence:
    def _sample(self):
        rng = np.random.default_rng(15)
        return SimilarityMatrix(
            "cosine", rng.uniform(-1, 1, size=(4, 3)),
            ["t0", "t1", "t2", "t3"], ["a", "b", "c"],
        )

    def test_binary_round_trip_exact(self, tmp_path):
        sims = self._sample()
        path = tmp_path / "cache.sim"
        save_similarity_binary(sims, path)
        again = load_similarity_binary(path)
        assert again.metric == sims.metric
        assert again.text_ids == sims.text_ids
        assert again.label_names == sims.label_names
        np.testing.assert_array_equal(again.values, sims.values)

    def test_jsonl_round_trip_exact(self, tmp_path):
        sims = self._sample()
        path = tmp_path / "cache.jsonl"
        save_similarity_jsonl(sims, path)
        again = load_similarity_jsonl(path)
        np.testing.assert_array_equal(again.values, sims.values)
        assert again.normalized == sims.normalized

    def test_format_sniffing(self, tmp_path):
        sims = self._sample()
        save_similarity_binary(sims, tmp_path / "x.bin")
        save_similarity_jsonl(sims, tmp_path / "x.jsonl")
        np.testing.assert_array_equal(
            load_similarity(tmp_path / "x.bin").values,
            load_similarity(tmp_path / "x.jsonl").values,
        )

    def test_truncated_binary_rejected(self, tmp_path):
        sims = self._sample()
        path = tmp_path / "cache.sim"
        save_similarity_binary(sims, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(ValidationError, match="expected"):
            load_similarity_binary(path)

    def test_missing_sidecar_rejected(self, tmp_path):
        sims = self._sample()
        path = tmp_path / "cache.sim"
        save_similarity_binary(sims, path)
        (tmp_path / "cache.sim.meta.json").unlink()
        with pytest.raises(ValidationError, match="sidecar"):
            load_similarity_binary(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.sim"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(ValidationError, match="magic"):
            load_similarity_binary(path)
