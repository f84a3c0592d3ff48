"""Exhaustive reference enumerators and error accounting."""

import numpy as np
import pytest

from epsgraph import (
    DataError,
    PairSet,
    brute_force_cosine,
    brute_force_hamming,
    cosine_distance,
    hamming_distance,
    measure_errors,
)

from conftest import REFERENCE_STRINGS, pool_from_strings, random_pool


def test_cosine_oracle_matches_pairwise_loop():
    rng = np.random.default_rng(12)
    data = rng.standard_normal((40, 5)).astype(np.float32)
    eps = 0.35
    want = {}
    for i in range(40):
        for j in range(i + 1, 40):
            dist = cosine_distance(data[i], data[j])
            if dist <= eps:
                want[(i, j)] = dist
    edges = brute_force_cosine(data, eps)
    assert {(int(i), int(j)) for i, j in edges.pairs} == set(want)
    for (i, j), dist in zip(edges.pairs, edges.distances):
        assert dist == pytest.approx(want[(int(i), int(j))], abs=1e-9)


def test_cosine_oracle_block_size_invariance():
    # The enumerated set is block-size independent; distances may move by an
    # ulp because the matrix product accumulates in a shape-dependent order.
    rng = np.random.default_rng(13)
    data = rng.standard_normal((300, 4)).astype(np.float32)
    full = brute_force_cosine(data, 0.2)
    small = brute_force_cosine(data, 0.2, block_rows=17)
    np.testing.assert_array_equal(full.pairs, small.pairs)
    np.testing.assert_allclose(full.distances, small.distances, atol=1e-12)


def test_cosine_oracle_sorted_and_empty():
    rng = np.random.default_rng(14)
    data = rng.standard_normal((100, 3)).astype(np.float32)
    edges = brute_force_cosine(data, 0.15)
    pairs = edges.pairs
    assert len(pairs) > 0
    keys = pairs[:, 0] * 1000 + pairs[:, 1]
    assert (np.diff(keys) > 0).all()
    assert len(brute_force_cosine(data[:1], 0.5)) == 0
    assert len(brute_force_cosine(np.eye(6, dtype=np.float32), 0.5)) == 0


def test_cosine_oracle_guards():
    data = np.ones((10, 2), dtype=np.float32)
    with pytest.raises(ValueError, match="limit"):
        brute_force_cosine(data, 0.1, limit=5)
    data[3] = 0.0
    with pytest.raises(DataError, match="row 3"):
        brute_force_cosine(data, 0.1)


def test_hamming_oracle_matches_pairwise_loop():
    pool = pool_from_strings(REFERENCE_STRINGS, k=4)
    for d in (0, 2, 5, 16):
        want = {(i, j) for i in range(10) for j in range(i + 1, 10)
                if hamming_distance(pool, i, j) <= d}
        assert brute_force_hamming(pool, d).to_set() == want


def test_hamming_oracle_blocking_invariance():
    rng = np.random.default_rng(15)
    pool = random_pool(rng, 500, 24, 4)
    a = brute_force_hamming(pool, 6)
    b = brute_force_hamming(pool, 6, block_rows=7)
    assert a == b and len(a) > 0


def test_measure_errors_counts():
    exact = PairSet([(0, 1), (1, 2), (2, 3)])
    approx = PairSet([(0, 1), (4, 5)])
    report = measure_errors(approx, exact)
    assert report.true_edge_count == 3
    assert report.missing_count == 2
    assert report.false_candidate_count == 1
    assert report.missing_ratio == pytest.approx(2 / 3)
    assert report.per_replicate is None


def test_measure_errors_perfect_and_empty():
    exact = PairSet([(0, 1)])
    assert measure_errors(exact, exact).missing_ratio == 0.0
    empty = PairSet([])
    report = measure_errors(empty, empty)
    assert report.missing_ratio == 0.0 and report.true_edge_count == 0


def test_measure_errors_accepts_arrays_and_edge_lists():
    rng = np.random.default_rng(16)
    data = rng.standard_normal((50, 4)).astype(np.float32)
    edges = brute_force_cosine(data, 0.3)
    report = measure_errors(edges, edges.pairs)
    assert report.missing_count == 0
    assert report.false_candidate_count == 0
