import numpy as np
import pytest

from lghp.config import Descriptor, ExtractionConfig, LghpParams
from lghp.errors import ConfigMismatchError, EmptyIndexError
from lghp.index_store import DatasetIndex
from lghp.matching import l1_distance, nn_classify, rank_all

CONFIG = ExtractionConfig(kind="lghp", params=LghpParams(radius_limit=1))
LENGTH = CONFIG.descriptor_length  # 3072


def desc(values):
    counts = np.zeros(LENGTH, dtype=np.int64)
    counts[: len(values)] = values
    return Descriptor(counts, CONFIG)


def make_index(rows, labels):
    matrix = np.zeros((len(rows), LENGTH), dtype=np.int64)
    for i, row in enumerate(rows):
        matrix[i, : len(row)] = row
    return DatasetIndex(
        labels=np.asarray(labels, dtype=np.int64),
        paths=tuple(f"img{i}.png" for i in range(len(rows))),
        matrix=matrix,
        config=CONFIG,
    )


class TestL1Distance:
    def test_identical_vectors(self):
        d = desc([1, 2, 3])
        assert l1_distance(d, d) == 0

    def test_small_example(self):
        assert l1_distance(desc([1, 2, 3]), desc([3, 2, 1])) == 4

    def test_matches_loop_oracle_on_long_vectors(self):
        rng = np.random.default_rng(41)
        x = rng.integers(0, 4000, LENGTH)
        y = rng.integers(0, 4000, LENGTH)
        expected = sum(abs(int(a) - int(b)) for a, b in zip(x, y))
        assert l1_distance(desc(x), desc(y)) == expected

    def test_config_mismatch(self):
        other = Descriptor(
            np.zeros(ExtractionConfig(params=LghpParams(radius_limit=2)).descriptor_length,
                     dtype=np.int64),
            ExtractionConfig(params=LghpParams(radius_limit=2)),
        )
        with pytest.raises(ConfigMismatchError):
            l1_distance(desc([1]), other)

    def test_metric_axioms_on_random_vectors(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            x, y, z = (desc(rng.integers(0, 500, 64)) for _ in range(3))
            dxy = l1_distance(x, y)
            assert dxy >= 0
            assert dxy == l1_distance(y, x)
            assert l1_distance(x, x) == 0
            assert dxy <= l1_distance(x, z) + l1_distance(z, y)
        # identity of indiscernibles: zero distance only for equal counts
        a = desc([5, 1])
        b = desc([5, 2])
        assert l1_distance(a, b) > 0


class TestRankAll:
    def test_exact_match_ranks_first(self):
        index = make_index([[10], [20], [30]], [0, 1, 2])
        ranked = rank_all(index.descriptor(1), index, include_self=True)
        assert ranked[0].image_id == 1
        assert ranked[0].distance == 0
        assert ranked[0].rank == 1

    def test_single_entry_excluding_self_is_empty(self):
        index = make_index([[10]], [0])
        assert rank_all(index.descriptor(0), index, include_self=False, self_id=0) == []

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(43)
        rows = [rng.integers(0, 100, 16) for _ in range(5)]
        index = make_index(rows, [0, 0, 1, 1, 2])
        query = desc(rng.integers(0, 100, 16))
        ranked = rank_all(query, index, include_self=True)
        oracle = sorted(
            (
                (sum(abs(int(a) - int(b)) for a, b in zip(query.counts, index.matrix[i])), i)
                for i in range(5)
            )
        )
        assert [(e.distance, e.image_id) for e in ranked] == oracle

    def test_output_is_permutation_with_dense_ranks(self):
        rng = np.random.default_rng(44)
        index = make_index([rng.integers(0, 50, 8) for _ in range(7)], [0] * 7)
        ranked = rank_all(index.descriptor(0), index, include_self=False, self_id=0)
        assert sorted(e.image_id for e in ranked) == [1, 2, 3, 4, 5, 6]
        assert [e.rank for e in ranked] == list(range(1, 7))
        dists = [e.distance for e in ranked]
        assert dists == sorted(dists)

    def test_ties_break_by_ascending_id(self):
        index = make_index([[5], [7], [7], [7]], [0, 1, 1, 1])
        ranked = rank_all(index.descriptor(1), index, include_self=True)
        assert [e.image_id for e in ranked] == [1, 2, 3, 0]

    def test_empty_index(self):
        index = make_index([], [])
        with pytest.raises(EmptyIndexError):
            rank_all(desc([1]), index)

    def test_config_mismatch(self):
        index = make_index([[1]], [0])
        other_cfg = ExtractionConfig(params=LghpParams(radius_limit=2))
        query = Descriptor(np.zeros(other_cfg.descriptor_length, dtype=np.int64), other_cfg)
        with pytest.raises(ConfigMismatchError):
            rank_all(query, index)


class TestNnClassify:
    def test_exact_duplicate_wins(self):
        index = make_index([[1], [500], [900]], [3, 5, 7])
        assert nn_classify(desc([500]), index) == 5

    def test_single_entry_gallery(self):
        index = make_index([[123]], [9])
        assert nn_classify(desc([0]), index) == 9

    def test_matches_argmin_oracle(self):
        rng = np.random.default_rng(45)
        rows = [rng.integers(0, 100, 12) for _ in range(9)]
        labels = [0, 0, 0, 1, 1, 1, 2, 2, 2]
        index = make_index(rows, labels)
        for _ in range(20):
            query = desc(rng.integers(0, 100, 12))
            dists = [
                sum(abs(int(a) - int(b)) for a, b in zip(query.counts, index.matrix[i]))
                for i in range(9)
            ]
            best = min(range(9), key=lambda i: (dists[i], i))
            assert nn_classify(query, index) == labels[best]

    def test_empty_gallery(self):
        with pytest.raises(EmptyIndexError):
            nn_classify(desc([1]), make_index([], []))
