"""Exhaustive reference implementations and error accounting.

These O(n^2) paths are the ground truth that every fast path is measured
against: exact cosine-radius enumeration, exact Hamming-radius enumeration,
and the bookkeeping that turns two edge sets into missing/extra counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitpool import BitStringPool
from .edges import EdgeList
from .errors import DataError
from .hamming_join import PairSet
from .lsh import as_dataset

__all__ = [
    "ErrorReport",
    "brute_force_cosine",
    "brute_force_hamming",
    "measure_errors",
]

_DEFAULT_LIMIT = 50_000


@dataclass(frozen=True)
class ErrorReport:
    """Set differences between an approximate result and the exact edge set.

    Attributes:
        true_edge_count: size of the exact set.
        missing_count: exact edges absent from the approximate set.
        false_candidate_count: approximate pairs absent from the exact set.
        missing_ratio: ``missing_count / true_edge_count`` (0 when the exact
            set is empty).
        per_replicate: first-witness attribution counts when the approximate
            side carries them, else None.
    """
    true_edge_count: int
    missing_count: int
    false_candidate_count: int
    missing_ratio: float
    per_replicate: tuple[int, ...] | None = None


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise ValueError(
            f"{n} rows exceed the exhaustive-comparison limit of {limit}; "
            "raise `limit` explicitly if this is intentional")


def brute_force_cosine(data, epsilon: float, *, limit: int = _DEFAULT_LIMIT,
                       block_rows: int = 1024) -> EdgeList:
    """Exact cosine-radius edge enumeration by blocked all-pairs comparison.

    Args:
        data: dataset or array; rows must have positive norm.
        epsilon: cosine radius (any value in [0, 2]).
        limit: refuse inputs with more rows than this.
        block_rows: row-block size for the pairwise products.

    Returns:
        :class:`EdgeList` sorted by ``(i, j)``.
    """
    data = as_dataset(data)
    n = data.count
    _check_limit(n, limit)
    if n < 2:
        return EdgeList()
    x = data.vectors.astype(np.float64, copy=False)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    if np.any(norms == 0.0):
        bad = int(np.argmin(norms))
        raise DataError(f"row {bad} has zero norm")
    unit = x / norms[:, None]
    pair_chunks = []
    dist_chunks = []
    for lo in range(0, n, block_rows):
        hi = min(lo + block_rows, n)
        dist = 1.0 - unit[lo:hi] @ unit[lo:].T
        np.clip(dist, 0.0, 2.0, out=dist)
        ii, jj = np.nonzero(dist <= epsilon)
        keep = jj > ii  # strict upper triangle of the global matrix
        ii, jj = ii[keep], jj[keep]
        if ii.size:
            pair_chunks.append(np.column_stack([ii + lo, jj + lo]))
            dist_chunks.append(dist[ii, jj])
    if not pair_chunks:
        return EdgeList()
    # Block-ascending construction already yields lexicographic (i, j) order.
    return EdgeList(np.vstack(pair_chunks), np.concatenate(dist_chunks))


def brute_force_hamming(pool: BitStringPool, d: int, *,
                        limit: int = _DEFAULT_LIMIT,
                        block_rows: int = 256) -> PairSet:
    """Exact d-neighbor pairs by exhaustive XOR-popcount comparison."""
    n = pool.count
    _check_limit(n, limit)
    if d < 0:
        raise ValueError("d must be non-negative")
    words = pool.words
    chunks = []
    for lo in range(0, n, block_rows):
        hi = min(lo + block_rows, n)
        # (hi-lo, n-lo, W) XOR block against all rows with larger index
        diff = words[lo:hi, None, :] ^ words[None, lo:, :]
        dist = np.bitwise_count(diff).sum(axis=2, dtype=np.int64)
        ii, jj = np.nonzero(dist <= d)
        keep = jj > ii
        ii, jj = ii[keep], jj[keep]
        if ii.size:
            chunks.append(np.column_stack([ii + lo, jj + lo]))
    if not chunks:
        return PairSet(np.empty((0, 2), dtype=np.int64), assume_normalized=True)
    return PairSet(np.vstack(chunks), assume_normalized=True)


def _pair_array(obj) -> np.ndarray:
    """Extract an (m, 2) pair array from any result-shaped object."""
    if isinstance(obj, np.ndarray):
        return obj.reshape(-1, 2).astype(np.int64, copy=False)
    if isinstance(obj, (PairSet,)):
        return obj.array
    if isinstance(obj, EdgeList):
        return obj.pairs
    for attr in ("pairs", "edge_list"):
        inner = getattr(obj, attr, None)
        if inner is not None:
            return _pair_array(inner)
    raise TypeError(f"cannot read pairs from {type(obj).__name__}")


def _pair_keys(pairs: np.ndarray) -> np.ndarray:
    """Collapse (i, j) rows into single sortable int64 keys."""
    if pairs.size and int(pairs.max()) >= 1 << 31:
        raise ValueError("indices above 2**31 are not supported here")
    return (pairs[:, 0] << np.int64(32)) | pairs[:, 1]


def measure_errors(approx, exact) -> ErrorReport:
    """Missing/extra accounting of an approximate edge set vs the exact one.

    Args:
        approx: a graph, candidate set, pair set, edge list, or (m, 2) array.
        exact: the reference edge set in any of the same shapes.

    Returns:
        :class:`ErrorReport`; the missing ratio is 0 when the exact set is
        empty.  First-witness attribution is copied through when the
        approximate object exposes ``per_replicate_new``.
    """
    a = _pair_keys(_pair_array(approx))
    e = _pair_keys(_pair_array(exact))
    missing = int(np.setdiff1d(e, a, assume_unique=False).size)
    extra = int(np.setdiff1d(a, e, assume_unique=False).size)
    true_count = int(e.size)
    ratio = missing / true_count if true_count else 0.0
    attribution = getattr(approx, "per_replicate_new", None)
    if attribution is None:
        stats = getattr(approx, "stats", None)
        attribution = getattr(stats, "per_replicate_new", None)
    return ErrorReport(
        true_edge_count=true_count,
        missing_count=missing,
        false_candidate_count=extra,
        missing_ratio=ratio,
        per_replicate=tuple(attribution) if attribution is not None else None)
