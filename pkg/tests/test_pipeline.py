"""End-to-end graph construction: merge, filter, and build variants."""

import math

import numpy as np
import pytest

from epsgraph import (
    DataError,
    MsmParams,
    PairSet,
    ProjectionSpec,
    build_graph,
    build_graph_hamming,
    build_graph_lsh_only,
    brute_force_cosine,
    brute_force_hamming,
    collision_prob,
    dedup_across_replicates,
    enumerate_pairs,
    filter_exact,
    hamming_distance,
    measure_errors,
    missing_edge_bound,
    project,
)

from conftest import planted_clusters, pool_from_strings, random_pool


def replicate_pools(data, params):
    return [project(data, ProjectionSpec(length=params.length,
                                         seed=params.seed, replicate_id=h))
            .partitioned(params.blocks)
            for h in range(1, params.replicates + 1)]


PARAMS = MsmParams(epsilon=0.05, gamma=1e-3, length=24, mismatch=2, blocks=4,
                   replicates=4, seed=7)


@pytest.fixture(scope="module")
def clustered():
    return planted_clusters(n=300, dim=8, clusters=6, cluster_size=20,
                            spread=0.03, seed=21)


# -------------------------------------------------------------------- merge

def test_dedup_equals_set_union(clustered):
    pools = replicate_pools(clustered, PARAMS)
    raw = [enumerate_pairs(p, PARAMS.mismatch) for p in pools]
    merged = dedup_across_replicates(pools, raw, PARAMS.mismatch)
    union = set()
    for r in raw:
        union |= r.to_set()
    got = {(int(i), int(j)) for i, j in merged.pairs}
    assert got == union
    assert len(got) == len(merged.pairs), "duplicates in merged set"
    assert merged.per_replicate_raw == tuple(len(r) for r in raw)
    assert sum(merged.per_replicate_new) == len(merged.pairs)


def test_dedup_attributes_first_witness(clustered):
    pools = replicate_pools(clustered, PARAMS)
    raw = [enumerate_pairs(p, PARAMS.mismatch) for p in pools]
    merged = dedup_across_replicates(pools, raw, PARAMS.mismatch)
    offsets = np.cumsum((0,) + merged.per_replicate_new)
    for h in range(PARAMS.replicates):
        for i, j in merged.pairs[offsets[h]:offsets[h + 1]]:
            assert hamming_distance(pools[h], int(i), int(j)) <= PARAMS.mismatch
            for g in range(h):
                assert hamming_distance(pools[g], int(i), int(j)) > PARAMS.mismatch


def test_dedup_validates_alignment(clustered):
    pools = replicate_pools(clustered, PARAMS)
    raw = [enumerate_pairs(p, PARAMS.mismatch) for p in pools]
    with pytest.raises(ValueError):
        dedup_across_replicates(pools[:-1], raw, PARAMS.mismatch)


# ------------------------------------------------------------------- filter

def test_filter_exact_keeps_exactly_the_neighbors(clustered):
    # Feed deliberately loose candidates: everything within Hamming 6 of a
    # single projection, true neighbors and impostors alike.
    pool = project(clustered, ProjectionSpec(length=24, seed=7, replicate_id=1))
    candidates = brute_force_hamming(pool.partitioned(4), 6)
    eps = 0.05
    edges = filter_exact(clustered, candidates, eps)
    truth = brute_force_cosine(clustered, eps)
    cand_set = candidates.to_set()
    want = [(int(i), int(j)) for i, j in truth.pairs
            if (int(i), int(j)) in cand_set]
    assert [(int(i), int(j)) for i, j in edges.pairs] == want
    for (i, j), dist in zip(edges.pairs, edges.distances):
        assert dist <= eps


def test_filter_exact_block_invariance(clustered):
    pool = project(clustered, ProjectionSpec(length=24, seed=7, replicate_id=1))
    candidates = brute_force_hamming(pool.partitioned(4), 6)
    a = filter_exact(clustered, candidates, 0.05)
    b = filter_exact(clustered, candidates, 0.05, block_pairs=37)
    assert a == b


def test_filter_exact_rejects_bad_indices(clustered):
    with pytest.raises(IndexError):
        filter_exact(clustered, np.array([[0, 400]]), 0.1)


# -------------------------------------------------------------------- build

def test_build_graph_edges_are_exact_neighbors(clustered):
    graph = build_graph(clustered, PARAMS)
    truth = brute_force_cosine(clustered, PARAMS.epsilon)
    report = measure_errors(graph.edge_list, truth)
    assert report.false_candidate_count == 0, "non-neighbors in the output"
    # With gamma = 1e-3 over ~1100 true edges the expected miss count is
    # around one; the fixed seed happens to catch everything.
    assert report.missing_ratio <= PARAMS.gamma * 10
    assert graph.stats.candidate_count >= graph.edge_count
    assert graph.stats.false_candidate_count == (
        graph.stats.candidate_count - graph.edge_count)
    assert graph.node_count == 300


def test_build_graph_thread_count_is_invisible(clustered):
    serial = build_graph(clustered, PARAMS, threads=1)
    threaded = build_graph(clustered, PARAMS, threads=3)
    assert serial.edge_list == threaded.edge_list
    assert (serial.stats.per_replicate_raw == threaded.stats.per_replicate_raw)
    assert (serial.stats.per_replicate_new == threaded.stats.per_replicate_new)


def test_build_graph_streaming_dedup_matches_retained(clustered):
    retained = build_graph(clustered, PARAMS)
    streamed = build_graph(clustered, PARAMS, max_pool_bytes=0)
    assert retained.edge_list == streamed.edge_list
    assert (retained.stats.per_replicate_new
            == streamed.stats.per_replicate_new)


def test_build_graph_reports_bound(clustered):
    graph = build_graph(clustered, PARAMS)
    p = collision_prob(PARAMS.epsilon)
    assert graph.stats.achieved_bound == missing_edge_bound(
        PARAMS.length, PARAMS.mismatch, p, PARAMS.replicates)


def test_build_graph_normalize_recenters():
    # Shifted clusters have tiny angles from the origin; after centering
    # they separate.  The flag must change the geometry, not the indexing.
    data = planted_clusters(n=200, dim=6, clusters=4, cluster_size=25,
                            spread=0.05, seed=3) + 40.0
    raw = build_graph(data, PARAMS)
    centered = build_graph(data, PARAMS, normalize=True)
    assert raw.edge_count > centered.edge_count
    truth = brute_force_cosine(
        (data - data.mean(axis=0))
        / np.linalg.norm(data - data.mean(axis=0), axis=1, keepdims=True),
        PARAMS.epsilon)
    report = measure_errors(centered.edge_list, truth)
    assert report.false_candidate_count == 0


def test_build_graph_empty_dataset_rejected():
    with pytest.raises(DataError):
        build_graph(np.zeros((0, 4), dtype=np.float32), PARAMS)


# --------------------------------------------------------------- variants

def test_hamming_builder_matches_oracle():
    rng = np.random.default_rng(31)
    pool = random_pool(rng, 200, 32, 4)
    for d in (0, 1, 3):
        assert build_graph_hamming(pool, d) == brute_force_hamming(pool, d)


def test_hamming_builder_handles_any_budget():
    rng = np.random.default_rng(32)
    pool = random_pool(rng, 60, 16, 1)      # single block: unusable for d > 0
    assert build_graph_hamming(pool, 2) == brute_force_hamming(pool, 2)
    # d >= length: every pair qualifies.
    allp = build_graph_hamming(pool, 16)
    assert len(allp) == 60 * 59 // 2


def test_lsh_only_uses_longest_feasible_strings(clustered):
    eps, gamma = 0.05, 1e-3
    graph = build_graph_lsh_only(clustered, eps, gamma, replicates=50)
    params = graph.params
    assert params.mismatch == 0 and params.blocks == 1
    assert params.replicates == 50
    p = collision_prob(eps)
    assert missing_edge_bound(params.length, 0, p, 50) <= gamma
    assert missing_edge_bound(params.length + 1, 0, p, 50) > gamma
    truth = brute_force_cosine(clustered, eps)
    report = measure_errors(graph.edge_list, truth)
    assert report.false_candidate_count == 0
    assert report.missing_ratio <= gamma * 10


def test_builds_agree_with_each_other(clustered):
    full = build_graph(clustered, PARAMS)
    baseline = build_graph_lsh_only(clustered, PARAMS.epsilon, PARAMS.gamma,
                                    replicates=50)
    assert full.edge_list == baseline.edge_list
