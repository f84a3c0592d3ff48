"""End-to-end neighbor-graph construction.

The full pipeline: project the dataset to ``replicates`` independent bit
pools, enumerate Hamming-``mismatch`` pairs in each, keep each pair only for
the first replicate that found it, then verify every candidate against the
exact cosine distance.  Soundness is absolute (the final filter is exact);
completeness is probabilistic with the expected missing-edge ratio bounded
by ``missing_edge_bound`` of the parameters.

Results are deterministic for a fixed ``(data, params)`` no matter how many
worker threads run: replicate results are merged in replicate order and the
first-witness rule depends only on replicate indices.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bitpool import BitStringPool, block_partition
from .edges import EdgeList
from .errors import DataError, InfeasibleError
from .hamming_join import PairSet, SortScratch, enumerate_pairs
from .lsh import (ProjectionSpec, as_dataset, center_normalize,
                  collision_prob, _check_norms, _project_words)
from .tuning import MsmParams, min_replicates, missing_edge_bound

__all__ = [
    "CandidateSet",
    "GraphStats",
    "NeighborGraph",
    "build_graph",
    "build_graph_hamming",
    "build_graph_lsh_only",
    "dedup_across_replicates",
    "filter_exact",
]

_POOL_MEMORY_DEFAULT = 1 << 30  # materialize replicate pools up to 1 GiB


@dataclass
class CandidateSet:
    """Union of per-replicate pair sets with first-witness provenance.

    Attributes:
        pairs: ``(m, 2)`` int64 array, unique, ordered by discovering
            replicate and then by that replicate's enumeration order.
        per_replicate_raw: pairs each replicate enumerated on its own.
        per_replicate_new: pairs first witnessed by each replicate; sums to
            ``len(pairs)``.
    """
    pairs: np.ndarray
    per_replicate_raw: tuple[int, ...]
    per_replicate_new: tuple[int, ...]

    def __len__(self) -> int:
        return self.pairs.shape[0]


@dataclass
class GraphStats:
    """Observable counters from one build.

    ``candidate_count`` is the merged candidate set size |E|;
    ``false_candidate_count`` is how many candidates the exact filter
    rejected; ``achieved_bound`` is the missing-edge bound of the parameters
    actually used (it can exceed the requested budget when a replicate cap
    was applied).  ``timings`` holds per-stage seconds: projection,
    enumeration, and the merge folds are summed across replicates,
    filter/total are wall times.
    """
    candidate_count: int
    edge_count: int
    false_candidate_count: int
    per_replicate_raw: tuple[int, ...]
    per_replicate_new: tuple[int, ...]
    achieved_bound: float
    timings: dict = field(default_factory=dict)


@dataclass
class NeighborGraph:
    """An edge list over ``node_count`` vectors plus build provenance."""
    node_count: int
    params: MsmParams
    edge_list: EdgeList
    stats: GraphStats

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return self.edge_list.as_tuples()

    @property
    def edge_count(self) -> int:
        return len(self.edge_list)


def _hamming_of_pairs(words: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    diff = words[pairs[:, 0]] ^ words[pairs[:, 1]]
    return np.bitwise_count(diff).sum(axis=1, dtype=np.int64)


def dedup_across_replicates(pools, raw, d: int) -> CandidateSet:
    """Merge per-replicate pair sets, keeping each pair's first witness.

    A pair found by replicate ``h`` survives exactly when its Hamming
    distance exceeds ``d`` in every earlier replicate's pool — i.e. when no
    earlier replicate could have found it.  The survivors are therefore the
    plain set union of the raw sets, each pair counted once.

    Args:
        pools: the replicate pools, all with equal count and length.
        raw: per-replicate :class:`PairSet` results, aligned with ``pools``.
        d: the mismatch budget the raw sets were enumerated at.

    Returns:
        :class:`CandidateSet` with per-replicate provenance counts.
    """
    if len(pools) != len(raw):
        raise ValueError("one raw pair set per pool is required")
    if len({(p.count, p.length) for p in pools}) > 1:
        raise ValueError("pools must share count and length")
    pieces = []
    raw_counts = []
    new_counts = []
    for h, pairs in enumerate(raw):
        arr = pairs.array if isinstance(pairs, PairSet) else np.asarray(pairs)
        arr = arr.reshape(-1, 2).astype(np.int64, copy=False)
        raw_counts.append(arr.shape[0])
        for g in range(h):
            if arr.shape[0] == 0:
                break
            dist = _hamming_of_pairs(pools[g].words, arr)
            arr = arr[dist > d]
        new_counts.append(arr.shape[0])
        if arr.shape[0]:
            pieces.append(arr)
    pairs = np.vstack(pieces) if pieces else np.empty((0, 2), dtype=np.int64)
    return CandidateSet(pairs=pairs, per_replicate_raw=tuple(raw_counts),
                        per_replicate_new=tuple(new_counts))


def _dedup_streaming(x: np.ndarray, params: MsmParams, raw_sorted) -> CandidateSet:
    """First-witness merge without retained pools.

    Earlier replicates' bits are regenerated from the seed, but only for the
    rows that still appear in the surviving candidate pairs, so memory stays
    proportional to the answer instead of replicates x pool size.
    """
    pieces = []
    raw_counts = []
    new_counts = []
    d = params.mismatch
    for h, pairs in enumerate(raw_sorted):
        arr = pairs.array if isinstance(pairs, PairSet) else np.asarray(pairs)
        arr = arr.reshape(-1, 2).astype(np.int64, copy=False)
        raw_counts.append(arr.shape[0])
        for g in range(h):
            if arr.shape[0] == 0:
                break
            rows = np.unique(arr)
            spec = ProjectionSpec(length=params.length, seed=params.seed,
                                  replicate_id=g + 1)
            words = _project_words(x, spec, rows=rows)
            local = np.searchsorted(rows, arr)
            dist = np.bitwise_count(words[local[:, 0]] ^ words[local[:, 1]]
                                    ).sum(axis=1, dtype=np.int64)
            arr = arr[dist > d]
        new_counts.append(arr.shape[0])
        if arr.shape[0]:
            pieces.append(arr)
    pairs = np.vstack(pieces) if pieces else np.empty((0, 2), dtype=np.int64)
    return CandidateSet(pairs=pairs, per_replicate_raw=tuple(raw_counts),
                        per_replicate_new=tuple(new_counts))


def filter_exact(data, candidates, epsilon: float,
                 block_pairs: int = 1 << 20) -> EdgeList:
    """Keep exactly the candidate pairs within cosine distance ``epsilon``.

    Args:
        data: the vectors the candidates index into.
        candidates: :class:`CandidateSet`, :class:`PairSet`, or (m, 2) array.
        epsilon: cosine radius.

    Returns:
        :class:`EdgeList` sorted by ``(i, j)`` with exact distances attached.
    """
    data = as_dataset(data)
    if isinstance(candidates, CandidateSet):
        pairs = candidates.pairs
    elif isinstance(candidates, PairSet):
        pairs = candidates.array
    else:
        pairs = np.asarray(candidates, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= data.count):
        raise IndexError("candidate index out of range")
    x = data.vectors.astype(np.float64, copy=False)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    kept_pairs = []
    kept_dists = []
    for lo in range(0, pairs.shape[0], block_pairs):
        chunk = pairs[lo:lo + block_pairs]
        i, j = chunk[:, 0], chunk[:, 1]
        dots = np.einsum("ij,ij->i", x[i], x[j])
        dist = 1.0 - dots / (norms[i] * norms[j])
        np.clip(dist, 0.0, 2.0, out=dist)
        keep = dist <= epsilon
        if keep.any():
            kept_pairs.append(chunk[keep])
            kept_dists.append(dist[keep])
    if not kept_pairs:
        return EdgeList()
    out_pairs = np.vstack(kept_pairs)
    out_dists = np.concatenate(kept_dists)
    order = np.lexsort((out_pairs[:, 1], out_pairs[:, 0]))
    return EdgeList(out_pairs[order], out_dists[order])


def _replicate_worker(x: np.ndarray, params: MsmParams, replicate_id: int,
                      chunk_bits: int, keep_pool: bool):
    t0 = time.perf_counter()
    spec = ProjectionSpec(length=params.length, seed=params.seed,
                          replicate_id=replicate_id)
    words = _project_words(x, spec)
    pool = BitStringPool(words, params.length, validate=False)
    pool = pool.partitioned(params.blocks)
    t1 = time.perf_counter()
    scratch = SortScratch(pool.count, chunk_bits)
    raw = enumerate_pairs(pool, params.mismatch, chunk_bits=chunk_bits,
                          scratch=scratch)
    t2 = time.perf_counter()
    return (pool if keep_pool else None), raw, t1 - t0, t2 - t1


def build_graph(data, params: MsmParams, *, threads: int | None = None,
                chunk_bits: int = 16, normalize: bool = False,
                max_pool_bytes: int = _POOL_MEMORY_DEFAULT) -> NeighborGraph:
    """Construct the cosine-radius neighbor graph of a dataset.

    Args:
        data: dataset or ``(n, dim)`` array.
        params: the parameter bundle (see :func:`epsgraph.tuning.auto_params`).
        threads: worker threads across replicates (default: CPU count).
            The result is byte-identical for any value.
        chunk_bits: radix chunk width for the masked sorts.
        normalize: center the columns and scale rows to unit norm first.
        max_pool_bytes: retain all replicate pools in memory up to this
            budget; beyond it, earlier pools are regenerated row-by-row from
            the seed during deduplication.

    Returns:
        :class:`NeighborGraph` with exact edge distances and build stats.
    """
    t_start = time.perf_counter()
    data = as_dataset(data)
    if data.count == 0:
        raise DataError("cannot build a graph over an empty dataset")
    if normalize:
        data = center_normalize(data)
    x = np.ascontiguousarray(data.vectors, dtype=np.float64)
    _check_norms(x)
    n = data.count
    q = params.replicates
    if threads is None:
        threads = os.cpu_count() or 1
    threads = max(1, min(threads, q))
    pool_bytes = q * n * (-(-params.length // 64)) * 8
    keep_pools = pool_bytes <= max_pool_bytes

    # Replicates are folded into the survivor list as soon as they complete
    # (in submit order, so the result is independent of scheduling): only the
    # unique candidates stay resident, never all raw sets at once.
    earlier_pools = []
    pieces = []
    raw_counts = []
    new_counts = []
    project_s = enumerate_s = dedup_s = 0.0

    def fold(h, result):
        nonlocal project_s, enumerate_s, dedup_s
        pool_h, raw_h, t_proj, t_enum = result
        project_s += t_proj
        enumerate_s += t_enum
        t0 = time.perf_counter()
        arr = raw_h.array
        raw_counts.append(arr.shape[0])
        for g in range(h):
            if arr.shape[0] == 0:
                break
            if keep_pools:
                dist = _hamming_of_pairs(earlier_pools[g].words, arr)
            else:
                rows = np.unique(arr)
                spec = ProjectionSpec(length=params.length, seed=params.seed,
                                      replicate_id=g + 1)
                words = _project_words(x, spec, rows=rows)
                local = np.searchsorted(rows, arr)
                dist = np.bitwise_count(
                    words[local[:, 0]] ^ words[local[:, 1]]
                ).sum(axis=1, dtype=np.int64)
            arr = arr[dist > params.mismatch]
        new_counts.append(arr.shape[0])
        if arr.shape[0]:
            pieces.append(arr)
        if keep_pools:
            earlier_pools.append(pool_h)
        dedup_s += time.perf_counter() - t0

    if threads == 1:
        for h in range(q):
            fold(h, _replicate_worker(x, params, h + 1, chunk_bits,
                                      keep_pools))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_replicate_worker, x, params, h + 1,
                                   chunk_bits, keep_pools)
                       for h in range(q)]
            for h, future in enumerate(futures):
                fold(h, future.result())
                futures[h] = None   # release the raw pairs promptly

    cand = CandidateSet(
        pairs=np.vstack(pieces) if pieces else np.empty((0, 2), dtype=np.int64),
        per_replicate_raw=tuple(raw_counts),
        per_replicate_new=tuple(new_counts))
    del pieces, earlier_pools
    t_filter = time.perf_counter()
    edge_list = filter_exact(data, cand, params.epsilon)
    t_end = time.perf_counter()

    stats = GraphStats(
        candidate_count=len(cand),
        edge_count=len(edge_list),
        false_candidate_count=len(cand) - len(edge_list),
        per_replicate_raw=cand.per_replicate_raw,
        per_replicate_new=cand.per_replicate_new,
        achieved_bound=missing_edge_bound(params.length, params.mismatch,
                                          collision_prob(params.epsilon), q),
        timings={
            "project_s": project_s,
            "enumerate_s": enumerate_s,
            "dedup_s": dedup_s,
            "filter_s": t_end - t_filter,
            "total_s": t_end - t_start,
        })
    return NeighborGraph(node_count=n, params=params, edge_list=edge_list,
                         stats=stats)


def _max_feasible_length(p: float, gamma: float, replicates: int,
                         fallback: int) -> int:
    """Largest string length whose d=0 bound stays within ``gamma``.

    The d=0 bound ``(1 - (1-p)^length)^replicates`` grows with length, so
    feasibility is a prefix; the closed-form crossing point is verified by
    direct evaluation on both sides.  With ``p == 0`` every length works and
    ``fallback`` is returned.
    """
    if p == 0.0:
        return fallback
    target = -math.expm1(math.log(gamma) / replicates)  # 1 - gamma**(1/Q)
    if target <= 0.0:
        return fallback
    length = max(1, math.floor(math.log(target) / math.log1p(-p)))
    while length > 1 and missing_edge_bound(length, 0, p, replicates) > gamma:
        length -= 1
    while missing_edge_bound(length + 1, 0, p, replicates) <= gamma:
        length += 1
    if missing_edge_bound(length, 0, p, replicates) > gamma:
        raise InfeasibleError(
            f"even a single bit misses too much: bound at length=1 is "
            f"{missing_edge_bound(1, 0, p, replicates):.3e} > gamma={gamma}")
    return length


def build_graph_lsh_only(data, epsilon: float, gamma: float, *,
                         replicates: int = 300, seed: int = 0,
                         threads: int | None = None,
                         chunk_bits: int = 16,
                         normalize: bool = False) -> NeighborGraph:
    """Baseline builder that relies on exact string collisions only.

    Runs the standard pipeline with mismatch budget 0 and a fixed replicate
    count, choosing the largest string length that still meets ``gamma``.
    Shorter strings collide more (keeping the bound) at the price of far
    more false candidates; this is the trade-off the mismatch budget exists
    to avoid, so this mode mainly serves as a comparison point.

    Raises:
        InfeasibleError: when no length >= 1 meets the budget.
    """
    data = as_dataset(data)
    if data.count == 0:
        raise DataError("cannot build a graph over an empty dataset")
    p = collision_prob(epsilon)
    fallback = 2 * math.ceil(math.log2(max(data.count, 2)))
    length = _max_feasible_length(p, gamma, replicates, fallback)
    params = MsmParams(epsilon=epsilon, gamma=gamma, length=length,
                       mismatch=0, blocks=1, replicates=replicates, seed=seed)
    return build_graph(data, params, threads=threads, chunk_bits=chunk_bits,
                       normalize=normalize)


def build_graph_hamming(pool: BitStringPool, d: int,
                        chunk_bits: int = 16) -> PairSet:
    """Exact d-neighbor pairs of an existing pool (no projection, no filter).

    Accepts any mismatch budget: ``d >= length`` trivially returns all
    pairs, and a pool without a usable block partition is re-partitioned to
    ``min(2 d, length)`` blocks first.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    n = pool.count
    if d >= pool.length:
        ii, jj = np.triu_indices(n, k=1)
        return PairSet(np.column_stack([ii, jj]).astype(np.int64),
                       assume_normalized=True)
    if d < pool.block_count:
        working = pool
    else:
        working = pool.partitioned(max(1, min(2 * d, pool.length)))
    return enumerate_pairs(working, d, chunk_bits=chunk_bits)
