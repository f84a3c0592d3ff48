"""All-pairs Hamming joins by multi-sorted block masking.

Every pair of rows within Hamming distance ``d`` differs in at most ``d`` of
the pool's ``k`` blocks, so it collides under at least one of the C(k, d)
block masks.  Sorting the masked keys once per mask makes colliding rows
adjacent; verification inside each equal-key group then recovers the exact
pair set.  The sort is a chunked LSD radix sort that visits only non-empty
buckets, so each pass costs O(n) independent of the alphabet.
"""

from __future__ import annotations

import itertools
import logging
import math

import numba
import numpy as np

from .bitpool import BitStringPool, kept_word_mask, masked_key_table

__all__ = [
    "PairSet",
    "SortScratch",
    "enumerate_pairs",
    "grouped_radix_sort",
    "mask_count",
]

logger = logging.getLogger(__name__)

_EMIT_BATCH = 1 << 24  # max candidate pairs buffered per kernel call

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


@numba.njit(inline="always")
def _popcount64(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@numba.njit(cache=True, nogil=True)
def _counting_pass(keys, col, perm_in, perm_out, counts, touched):
    """One stable counting-sort pass on chunk column ``col``.

    ``counts`` is a persistent zeroed table indexed by chunk value; only the
    buckets actually hit are prefix-summed (in first-seen order) and zeroed
    again afterwards, so a pass is O(n) no matter how large the table is.
    Bucket order is irrelevant here: stability alone guarantees that rows
    with equal keys end up adjacent after the last pass.
    """
    n = perm_in.size
    n_touched = 0
    for idx in range(n):
        key = keys[perm_in[idx], col]
        if counts[key] == 0:
            touched[n_touched] = key
            n_touched += 1
        counts[key] += 1
    total = 0
    for t in range(n_touched):
        b = touched[t]
        c = counts[b]
        counts[b] = total
        total += c
    for idx in range(n):
        row = perm_in[idx]
        key = keys[row, col]
        perm_out[counts[key]] = row
        counts[key] += 1
    for t in range(n_touched):
        counts[touched[t]] = 0


@numba.njit(cache=True, nogil=True)
def _group_bounds(keys, perm, bounds):
    """Boundaries of equal-key runs in ``perm``; returns the group count."""
    n = perm.size
    n_chunks = keys.shape[1]
    bounds[0] = 0
    n_groups = 1
    for idx in range(1, n):
        a = perm[idx - 1]
        b = perm[idx]
        for c in range(n_chunks):
            if keys[a, c] != keys[b, c]:
                bounds[n_groups] = idx
                n_groups += 1
                break
    bounds[n_groups] = n
    return n_groups


@numba.njit(cache=True, nogil=True)
def _emit_group_pairs(words, perm, bounds, g_lo, g_hi, kept_masks, mask_idx,
                      d, out):
    """Verified, first-witness pairs from groups ``g_lo:g_hi``.

    A pair inside a group is emitted iff its full Hamming distance is at most
    ``d`` and no earlier mask already grouped it (earlier-mask equality is
    tested as XOR-AND-kept-bits == 0, which is exact).  Returns the number of
    pairs written to ``out``.
    """
    n_words = words.shape[1]
    m = 0
    for g in range(g_lo, g_hi):
        start = bounds[g]
        end = bounds[g + 1]
        for a in range(start, end):
            ia = perm[a]
            for b in range(a + 1, end):
                ib = perm[b]
                dist = np.int64(0)
                for w in range(n_words):
                    dist += _popcount64(words[ia, w] ^ words[ib, w])
                    if dist > d:
                        break
                if dist > d:
                    continue
                seen = False
                for g_prev in range(mask_idx):
                    equal = True
                    for w in range(n_words):
                        if (words[ia, w] ^ words[ib, w]) & kept_masks[g_prev, w]:
                            equal = False
                            break
                    if equal:
                        seen = True
                        break
                if seen:
                    continue
                if ia < ib:
                    out[m, 0] = ia
                    out[m, 1] = ib
                else:
                    out[m, 0] = ib
                    out[m, 1] = ia
                m += 1
    return m


class PairSet:
    """Set of index pairs ``(i, j)`` with ``i < j``, stored sorted and unique.

    Attributes:
        array: ``(m, 2)`` int64 array sorted lexicographically.
    """

    __slots__ = ("array",)

    def __init__(self, pairs, *, assume_normalized: bool = False):
        arr = np.asarray(pairs, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must have shape (m, 2)")
        if not assume_normalized:
            lo = arr.min(axis=1)
            hi = arr.max(axis=1)
            if np.any(lo == hi):
                raise ValueError("self-pairs are not allowed")
            arr = np.column_stack([lo, hi])
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            if arr.shape[0] > 1:
                dup = np.all(arr[1:] == arr[:-1], axis=1)
                if dup.any():
                    arr = np.vstack([arr[:1], arr[1:][~dup]])
        self.array = arr

    @classmethod
    def from_pairs(cls, pairs) -> "PairSet":
        return cls(np.array(list(pairs), dtype=np.int64).reshape(-1, 2))

    def to_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.array}

    def __len__(self) -> int:
        return self.array.shape[0]

    def __iter__(self):
        for i, j in self.array:
            yield int(i), int(j)

    def __contains__(self, pair) -> bool:
        i, j = (int(pair[0]), int(pair[1]))
        if i > j:
            i, j = j, i
        idx = np.searchsorted(self.array[:, 0], i)
        while idx < len(self) and self.array[idx, 0] == i:
            if self.array[idx, 1] == j:
                return True
            idx += 1
        return False

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairSet):
            return NotImplemented
        return (self.array.shape == other.array.shape
                and bool(np.all(self.array == other.array)))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PairSet({len(self)} pairs)"


class SortScratch:
    """Reusable buffers for grouped radix sorting.

    One scratch serves any number of sorts over pools with at most
    ``capacity`` rows at a fixed chunk width.  Not thread-safe; give each
    worker its own instance.
    """

    def __init__(self, capacity: int, chunk_bits: int = 16):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        if not (1 <= chunk_bits <= 24):
            raise ValueError("chunk_bits must be in [1, 24]")
        self.capacity = capacity
        self.chunk_bits = chunk_bits
        self.counts = np.zeros(1 << chunk_bits, dtype=np.int64)
        self.touched = np.empty(min(capacity, 1 << chunk_bits), dtype=np.int64)
        self.perm_a = np.empty(capacity, dtype=np.int64)
        self.perm_b = np.empty(capacity, dtype=np.int64)
        self.bounds = np.empty(capacity + 1, dtype=np.int64)

    def check(self, n: int, chunk_bits: int) -> None:
        if n > self.capacity:
            raise ValueError(f"scratch sized for {self.capacity} rows, got {n}")
        if chunk_bits != self.chunk_bits:
            raise ValueError(
                f"scratch built for chunk_bits={self.chunk_bits}, got {chunk_bits}")


def mask_count(k: int, d: int) -> int:
    """Number of size-``d`` block masks over ``k`` blocks, C(k, d)."""
    if d < 0 or k < 0 or d > k:
        raise ValueError(f"need 0 <= d <= k, got d={d}, k={k}")
    return math.comb(k, d)


def _sort_grouped(pool: BitStringPool, mask, chunk_bits: int,
                  scratch: SortScratch):
    """Sort rows by masked key; returns (perm, bounds, n_groups, keys).

    perm and bounds alias scratch buffers — consume before the next sort.
    """
    n = pool.count
    scratch.check(n, chunk_bits)
    keys = masked_key_table(pool, mask, chunk_bits)
    perm = scratch.perm_a[:n]
    perm[:] = np.arange(n, dtype=np.int64)
    if keys.shape[1] == 0:
        scratch.bounds[0] = 0
        scratch.bounds[1] = n
        return perm, scratch.bounds, 1, keys
    out = scratch.perm_b[:n]
    for col in range(keys.shape[1] - 1, -1, -1):
        _counting_pass(keys, col, perm, out, scratch.counts, scratch.touched)
        perm, out = out, perm
    n_groups = _group_bounds(keys, perm, scratch.bounds)
    return perm, scratch.bounds, n_groups, keys


def grouped_radix_sort(pool: BitStringPool, mask, chunk_bits: int = 16,
                       scratch: SortScratch | None = None):
    """Order rows so that equal masked keys are adjacent.

    The ordering is deterministic but not lexicographic: buckets are laid out
    in first-seen order, which is all grouping needs.

    Args:
        pool: source pool (its ``block_bounds`` define the blocks).
        mask: block indices to drop.
        chunk_bits: radix chunk width.
        scratch: optional reusable :class:`SortScratch`.

    Returns:
        ``(perm, group_bounds)`` — a permutation of row indices and the
        boundaries of each equal-key run within it (``n_groups + 1`` offsets).
    """
    if pool.count == 0:
        raise ValueError("pool is empty")
    if scratch is None:
        scratch = SortScratch(pool.count, chunk_bits)
    perm, bounds, n_groups, _ = _sort_grouped(pool, mask, chunk_bits, scratch)
    return perm.copy(), bounds[:n_groups + 1].copy()


def enumerate_pairs(pool: BitStringPool, d: int, chunk_bits: int = 16,
                    scratch: SortScratch | None = None,
                    oversized_fraction: float = 0.25) -> PairSet:
    """All pairs ``(i, j)``, ``i < j``, with Hamming distance at most ``d``.

    For each of the C(k, d) block masks, rows are grouped by masked key and
    every within-group pair is verified against the full strings.  A pair is
    emitted only under the first mask (in lexicographic mask order) that
    groups it, so the result carries no duplicates.  Exact: a pair within
    distance ``d`` mismatches in at most ``d`` blocks and therefore collides
    under the mask covering those blocks.

    Args:
        pool: source pool; its block partition supplies ``k``.
        d: mismatch budget, ``0 <= d < k``.
        chunk_bits: radix chunk width.
        scratch: optional reusable sort scratch.
        oversized_fraction: log a warning when one equal-key group exceeds
            this fraction of the pool (the block parameters are likely too
            coarse for the data).

    Returns:
        :class:`PairSet` of all d-neighbor pairs, sorted by ``(i, j)``.
    """
    n = pool.count
    if n == 0:
        raise ValueError("pool is empty")
    k = pool.block_count
    if not (0 <= d < k <= pool.length):
        raise ValueError(f"need 0 <= d < k <= length, got d={d}, k={k}, "
                         f"length={pool.length}")
    if scratch is None:
        scratch = SortScratch(n, chunk_bits)
    masks = list(itertools.combinations(range(k), d))
    kept_masks = np.vstack([kept_word_mask(pool.length, pool.block_bounds, m)
                            for m in masks])
    words = pool.words
    pieces = []
    oversized = 0
    for h, mask in enumerate(masks):
        perm, bounds, n_groups, _ = _sort_grouped(pool, mask, chunk_bits, scratch)
        sizes = np.diff(bounds[:n_groups + 1])
        largest = int(sizes.max())
        if n > 16 and largest > oversized_fraction * n:
            oversized = max(oversized, largest)
        caps = sizes * (sizes - 1) // 2
        total = int(caps.sum())
        if total == 0:
            continue
        # Split the group range so no single kernel call buffers more than
        # _EMIT_BATCH candidate pairs.
        cum = np.cumsum(caps)
        g_lo = 0
        while g_lo < n_groups:
            base = cum[g_lo - 1] if g_lo else 0
            g_hi = int(np.searchsorted(cum, base + _EMIT_BATCH, side="right"))
            g_hi = max(g_hi, g_lo + 1)
            cap = int(cum[g_hi - 1] - base)
            buf = np.empty((cap, 2), dtype=np.int64)
            m = _emit_group_pairs(words, perm, bounds, g_lo, g_hi, kept_masks,
                                  h, d, buf)
            if m:
                # Copy so the slice does not pin the full capacity buffer.
                pieces.append(buf[:m].copy())
            g_lo = g_hi
    if oversized:
        logger.warning(
            "largest equal-key group holds %d of %d rows; the block "
            "parameters look too coarse for this pool", oversized, n)
    if pieces:
        pairs = np.vstack(pieces)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        pairs = pairs[order]
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    return PairSet(pairs, assume_normalized=True)
