"""End-to-end: auto-tuned neighbor graph on planted clusters, checked exactly.

Generates 8000 points containing 20 tight clusters on the unit sphere plus
Gaussian background, estimates the output size from a pair sample, lets the
tuner pick projection length / mismatch budget / replicate count for a
1e-3 miss bound, builds the graph, and then diffs it against the exact
O(n^2) scan.
"""

import math
import time

import numpy as np

from epsgraph import (
    auto_params_detailed,
    brute_force_cosine,
    build_graph,
    collision_prob,
    estimate_output_size,
    measure_errors,
)


def planted(n, dim, clusters, size, spread, seed):
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((clusters, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    rows = np.repeat(centers, size, axis=0)
    rows = rows + spread * rng.standard_normal(rows.shape)
    noise = rng.standard_normal((n - clusters * size, dim))
    return np.vstack([rows, noise]).astype(np.float32)


def main():
    n, dim = 8000, 48
    data = planted(n, dim, clusters=20, size=40, spread=0.015, seed=11)
    epsilon = 1.0 - math.cos(0.1 * math.pi)
    print("n=%d dim=%d epsilon=%.4f (per-bit mismatch p=%.3f)"
          % (n, dim, epsilon, collision_prob(epsilon)))

    estimate = estimate_output_size(data, epsilon, sample_pairs=500_000, seed=11)
    print("sampled %d pairs, %d inside -> expect about %.0f edges (CI %.0f..%.0f)"
          % (estimate.sampled_pairs, estimate.hits, estimate.estimate_s,
             estimate.ci_low, estimate.ci_high))

    params, report = auto_params_detailed(n, epsilon, 1e-3, estimate, seed=11)
    print("tuned: length=%d mismatch=%d blocks=%d replicates=%d (bound %.2e)"
          % (params.length, params.mismatch, params.blocks, params.replicates,
             report.achieved_bound))

    t0 = time.perf_counter()
    graph = build_graph(data, params)
    built = time.perf_counter() - t0
    stats = graph.stats
    print("built %d edges from %d candidates in %.2f s"
          % (stats.edge_count, stats.candidate_count, built))
    print("  stage seconds: %s"
          % {k: round(v, 3) for k, v in stats.timings.items()})

    t0 = time.perf_counter()
    exact = brute_force_cosine(data, epsilon)
    scanned = time.perf_counter() - t0
    errs = measure_errors(graph.edge_list, exact)
    print("exact scan: %d edges in %.2f s" % (errs.true_edge_count, scanned))
    print("missing %d (ratio %.2e, bound %.2e), false %d"
          % (errs.missing_count, errs.missing_ratio, stats.achieved_bound,
             errs.false_candidate_count))


if __name__ == "__main__":
    main()
