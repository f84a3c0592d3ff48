"""Bit-packed pools of equal-length binary strings.

Rows are packed little-endian into ``uint64`` words: bit ``t`` of a row lives
in word ``t // 64`` at bit position ``t % 64``.  Padding bits past the row
length are always zero, which keeps XOR-popcount Hamming distances correct
without per-call masking.
"""

from __future__ import annotations

import sys

import numpy as np

__all__ = [
    "BitStringPool",
    "block_partition",
    "hamming_distance",
    "kept_word_mask",
    "masked_key_chunks",
    "masked_key_table",
    "validate_mask",
]

if sys.byteorder != "little":
    raise ImportError("bit-packed pools require a little-endian platform")

_WORD_BITS = 64
_MAX_CHUNK_BITS = 24


def _word_count(length: int) -> int:
    return max(1, -(-length // _WORD_BITS))


def _pad_mask(length: int) -> np.uint64:
    """Mask selecting the meaningful bits of the final word."""
    r = length % _WORD_BITS
    if r == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << r) - 1)


def block_partition(length: int, k: int) -> np.ndarray:
    """Split ``length`` bit positions into ``k`` contiguous blocks.

    The first ``length % k`` blocks get ``ceil(length / k)`` bits and the
    rest get ``floor(length / k)``, so any two block sizes differ by at
    most one.

    Args:
        length: total number of bit positions.
        k: number of blocks, ``1 <= k <= length``.

    Returns:
        int64 array of ``k + 1`` offsets, starting at 0 and ending at
        ``length``.

    Raises:
        ValueError: if ``k`` is zero or exceeds ``length``.
    """
    if k < 1 or k > length:
        raise ValueError(f"block count {k} outside [1, {length}]")
    base, rem = divmod(length, k)
    sizes = np.full(k, base, dtype=np.int64)
    sizes[:rem] += 1
    bounds = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(sizes, out=bounds[1:])
    return bounds


def validate_mask(mask, block_count: int) -> tuple[int, ...]:
    """Normalize a block mask to a sorted tuple of distinct 0-based indices."""
    out = tuple(sorted(int(b) for b in mask))
    if len(set(out)) != len(out):
        raise ValueError(f"mask {out} has repeated block indices")
    if out and (out[0] < 0 or out[-1] >= block_count):
        raise ValueError(f"mask {out} outside [0, {block_count})")
    return out


class BitStringPool:
    """Immutable collection of ``count`` bit strings of ``length`` bits.

    Attributes:
        words: ``(count, word_count)`` uint64 array, one packed row per string.
        length: bits per string.
        block_bounds: ``k + 1`` offsets partitioning ``[0, length)`` into
            ``k`` contiguous blocks (defaults to a single block).
    """

    __slots__ = ("words", "length", "block_bounds", "_bits")

    def __init__(self, words: np.ndarray, length: int,
                 block_bounds: np.ndarray | None = None, *,
                 validate: bool = True):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2:
            raise ValueError("words must be a 2-D array")
        if length < 1:
            raise ValueError("length must be positive")
        if words.shape[1] != _word_count(length):
            raise ValueError(
                f"expected {_word_count(length)} words per row for length "
                f"{length}, got {words.shape[1]}")
        if block_bounds is None:
            block_bounds = block_partition(length, 1)
        block_bounds = np.asarray(block_bounds, dtype=np.int64)
        if validate:
            if np.any(words[:, -1] & ~_pad_mask(length)):
                raise ValueError("padding bits beyond the row length must be zero")
            if (block_bounds[0] != 0 or block_bounds[-1] != length
                    or np.any(np.diff(block_bounds) < 1)):
                raise ValueError("block_bounds must strictly increase from 0 to length")
            sizes = np.diff(block_bounds)
            if sizes.max() - sizes.min() > 1:
                raise ValueError("block sizes may differ by at most one bit")
        self.words = words
        self.length = int(length)
        self.block_bounds = block_bounds
        self._bits = None

    # -- construction ------------------------------------------------------

    @classmethod
    def from_bits(cls, bits, block_bounds: np.ndarray | None = None) -> "BitStringPool":
        """Pack an ``(n, length)`` array of 0/1 values into a pool."""
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.shape[1] < 1:
            raise ValueError("bits must be a non-empty 2-D array")
        if bits.dtype != np.uint8:
            if not np.isin(bits, (0, 1)).all():
                raise ValueError("bit values must be 0 or 1")
            bits = bits.astype(np.uint8)
        n, length = bits.shape
        packed = np.packbits(bits, axis=1, bitorder="little")
        row_bytes = _word_count(length) * 8
        buf = np.zeros((n, row_bytes), dtype=np.uint8)
        buf[:, :packed.shape[1]] = packed
        words = buf.view("<u8")
        return cls(words, length, block_bounds, validate=False)

    def partitioned(self, k: int) -> "BitStringPool":
        """Return a pool sharing this storage but split into ``k`` blocks."""
        return BitStringPool(self.words, self.length,
                             block_partition(self.length, k), validate=False)

    # -- basic views -------------------------------------------------------

    @property
    def count(self) -> int:
        return self.words.shape[0]

    @property
    def word_count(self) -> int:
        return self.words.shape[1]

    @property
    def block_count(self) -> int:
        return len(self.block_bounds) - 1

    def to_bits(self) -> np.ndarray:
        """Unpack to an ``(n, length)`` uint8 array of 0/1 values."""
        raw = self.words.view(np.uint8).reshape(self.count, self.word_count * 8)
        return np.unpackbits(raw, axis=1, bitorder="little")[:, :self.length]

    def bits(self) -> np.ndarray:
        """Cached read-only unpacked view (lazily materialized once)."""
        if self._bits is None:
            b = self.to_bits()
            b.setflags(write=False)
            self._bits = b
        return self._bits

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (f"BitStringPool(count={self.count}, length={self.length}, "
                f"blocks={self.block_count})")


def hamming_distance(pool: BitStringPool, i: int, j: int) -> int:
    """Number of bit positions where rows ``i`` and ``j`` disagree.

    Computed by XOR-and-popcount over the packed words, masking the final
    partial word to the pool length.

    Raises:
        IndexError: if either index is out of range.
    """
    n = pool.count
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"row index out of range for pool of {n}")
    x = pool.words[i] ^ pool.words[j]
    x[-1] &= _pad_mask(pool.length)
    return int(np.bitwise_count(x).sum())


def kept_word_mask(length: int, block_bounds: np.ndarray, mask) -> np.ndarray:
    """Per-word uint64 masks of the bit positions *outside* the masked blocks.

    ``(row_i ^ row_j) & kept_word_mask == 0`` everywhere exactly when the two
    rows agree on every kept position, i.e. when their masked strings are
    equal.
    """
    mask = validate_mask(mask, len(block_bounds) - 1)
    keep = np.ones(length, dtype=np.uint8)
    for b in mask:
        keep[block_bounds[b]:block_bounds[b + 1]] = 0
    packed = np.packbits(keep, bitorder="little")
    buf = np.zeros(_word_count(length) * 8, dtype=np.uint8)
    buf[:packed.size] = packed
    return buf.view("<u8")


def _kept_positions(block_bounds: np.ndarray, mask: tuple[int, ...]) -> np.ndarray:
    """Bit positions of the kept blocks, in ascending order."""
    dropped = set(mask)
    parts = [np.arange(block_bounds[b], block_bounds[b + 1])
             for b in range(len(block_bounds) - 1) if b not in dropped]
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts).astype(np.int64)


def masked_key_table(pool: BitStringPool, mask, chunk_bits: int = 16) -> np.ndarray:
    """Fixed-width sort keys for every row under one block mask.

    The kept blocks of each row are concatenated in ascending block order and
    split into ``chunk_bits``-wide chunks, most-significant bit first, with
    the final chunk zero-padded at the low end.  Two rows get identical key
    rows exactly when their masked strings are equal.

    Args:
        pool: source pool.
        mask: iterable of distinct 0-based block indices to drop.
        chunk_bits: chunk width in bits (1..24; 16 keeps the radix bucket
            table at 65536 entries, 20 trades memory for fewer passes).

    Returns:
        ``(count, n_chunks)`` int64 array of chunk values.
    """
    if not (1 <= chunk_bits <= _MAX_CHUNK_BITS):
        raise ValueError(f"chunk_bits must be in [1, {_MAX_CHUNK_BITS}]")
    mask = validate_mask(mask, pool.block_count)
    cols = _kept_positions(pool.block_bounds, mask)
    n = pool.count
    if cols.size == 0:
        return np.zeros((n, 0), dtype=np.int64)
    sub = pool.bits()[:, cols]
    n_chunks = -(-cols.size // chunk_bits)
    padded = np.zeros((n, n_chunks * chunk_bits), dtype=np.uint8)
    padded[:, :cols.size] = sub
    weights = (np.int64(1) << np.arange(chunk_bits - 1, -1, -1, dtype=np.int64))
    return padded.reshape(n, n_chunks, chunk_bits) @ weights


def masked_key_chunks(pool: BitStringPool, i: int, mask,
                      chunk_bits: int = 16) -> np.ndarray:
    """Chunked masked-string key of a single row (see ``masked_key_table``)."""
    if not (0 <= i < pool.count):
        raise IndexError(f"row index {i} out of range")
    mask = validate_mask(mask, pool.block_count)
    cols = _kept_positions(pool.block_bounds, mask)
    if cols.size == 0:
        return np.zeros(0, dtype=np.int64)
    row = pool.bits()[i, cols]
    n_chunks = -(-cols.size // chunk_bits)
    padded = np.zeros(n_chunks * chunk_bits, dtype=np.uint8)
    padded[:cols.size] = row
    weights = (np.int64(1) << np.arange(chunk_bits - 1, -1, -1, dtype=np.int64))
    return padded.reshape(n_chunks, chunk_bits) @ weights
