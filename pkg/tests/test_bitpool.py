"""Bit packing, block partitions, and masked keys."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsgraph import (
    BitStringPool,
    block_partition,
    hamming_distance,
    masked_key_chunks,
)
from epsgraph.bitpool import kept_word_mask, masked_key_table, validate_mask

from conftest import REFERENCE_STRINGS, hamming_oracle, pool_from_strings


# ---------------------------------------------------------------- partition

def test_block_partition_small_examples():
    assert block_partition(16, 4).tolist() == [0, 4, 8, 12, 16]
    assert block_partition(10, 3).tolist() == [0, 4, 7, 10]
    assert block_partition(7, 7).tolist() == list(range(8))
    assert block_partition(5, 1).tolist() == [0, 5]


@given(length=st.integers(1, 500), k=st.integers(1, 500))
def test_block_partition_properties(length, k):
    if k > length:
        with pytest.raises(ValueError):
            block_partition(length, k)
        return
    bounds = block_partition(length, k)
    sizes = np.diff(bounds)
    assert bounds[0] == 0 and bounds[-1] == length
    assert len(sizes) == k
    assert sizes.min() >= 1
    # Nearly equal: no two blocks differ by more than one bit, and the
    # wider blocks come first.
    assert sizes.max() - sizes.min() <= 1
    assert (np.diff(sizes) <= 0).all()


def test_validate_mask_sorts_and_rejects():
    assert validate_mask((2, 0), 4) == (0, 2)
    assert validate_mask((), 4) == ()
    with pytest.raises(ValueError):
        validate_mask((0, 0), 4)
    with pytest.raises(ValueError):
        validate_mask((4,), 4)
    with pytest.raises(ValueError):
        validate_mask((-1,), 4)


# ------------------------------------------------------------ pack / unpack

@given(st.data())
@settings(max_examples=60)
def test_bits_round_trip(data):
    n = data.draw(st.integers(1, 24))
    length = data.draw(st.integers(1, 200))
    seed = data.draw(st.integers(0, 2**31))
    bits = (np.random.default_rng(seed).random((n, length)) < 0.5)
    pool = BitStringPool.from_bits(bits.astype(np.uint8))
    assert pool.count == n
    assert pool.length == length
    assert pool.word_count == (length + 63) // 64
    np.testing.assert_array_equal(pool.to_bits(), bits.astype(np.uint8))


@given(length=st.integers(1, 130), seed=st.integers(0, 2**31))
@settings(max_examples=40)
def test_padding_bits_are_zero(length, seed):
    bits = (np.random.default_rng(seed).random((5, length)) < 0.5)
    pool = BitStringPool.from_bits(bits.astype(np.uint8))
    pad = pool.word_count * 64 - length
    if pad:
        assert not np.any(pool.words[:, -1] >> np.uint64(64 - pad))


def test_bit_order_within_words():
    # Bit t of a string lands in word t // 64 at position t % 64.
    bits = np.zeros((1, 130), dtype=np.uint8)
    bits[0, [0, 63, 64, 129]] = 1
    pool = BitStringPool.from_bits(bits)
    words = pool.words[0]
    assert words[0] == (1 | (1 << 63))
    assert words[1] == 1
    assert words[2] == 1 << (129 - 128)


def test_partitioned_shares_words():
    pool = pool_from_strings(REFERENCE_STRINGS)
    four = pool.partitioned(4)
    assert four.words is pool.words
    assert four.block_count == 4
    assert pool.block_count == 1


def test_empty_pool():
    pool = BitStringPool.from_bits(np.zeros((0, 16), dtype=np.uint8))
    assert pool.count == 0
    assert pool.to_bits().shape == (0, 16)


# ------------------------------------------------------------------ hamming

def test_hamming_against_string_oracle():
    pool = pool_from_strings(REFERENCE_STRINGS)
    n = pool.count
    for i in range(n):
        for j in range(n):
            assert hamming_distance(pool, i, j) == hamming_oracle(
                REFERENCE_STRINGS, i, j)


@given(length=st.integers(1, 200), seed=st.integers(0, 2**31))
@settings(max_examples=40)
def test_hamming_matches_bit_xor(length, seed):
    rng = np.random.default_rng(seed)
    bits = (rng.random((6, length)) < 0.5).astype(np.uint8)
    pool = BitStringPool.from_bits(bits)
    i, j = rng.integers(0, 6, size=2)
    assert hamming_distance(pool, int(i), int(j)) == int(
        (bits[i] != bits[j]).sum())


def test_hamming_ignores_padding():
    # Two strings of length 65 differing only in the final (second-word) bit.
    bits = np.zeros((2, 65), dtype=np.uint8)
    bits[1, 64] = 1
    pool = BitStringPool.from_bits(bits)
    assert hamming_distance(pool, 0, 1) == 1
    assert hamming_distance(pool, 0, 0) == 0


# -------------------------------------------------------------- masked keys

def test_kept_word_mask_drops_exact_positions():
    bounds = block_partition(16, 4)
    kept = kept_word_mask(16, bounds, (1,))[0]
    # Block 1 covers bits 4..7; everything else inside the 16 bits survives.
    expect = 0
    for t in range(16):
        if not (4 <= t < 8):
            expect |= 1 << t
    assert int(kept) == expect


def test_kept_word_mask_extremes():
    bounds = block_partition(70, 2)
    full = kept_word_mask(70, bounds, ())
    assert full[0] == np.uint64(0xFFFFFFFFFFFFFFFF)
    assert int(full[1]) == (1 << 6) - 1  # only 6 real bits in word 2
    none = kept_word_mask(70, bounds, (0, 1))
    assert not none.any()


def test_masked_key_table_matches_per_row():
    rng = np.random.default_rng(7)
    bits = (rng.random((9, 40)) < 0.5).astype(np.uint8)
    pool = BitStringPool.from_bits(bits).partitioned(5)
    for mask in [(), (0,), (2, 4), (0, 1, 2)]:
        table = masked_key_table(pool, mask, chunk_bits=12)
        for i in range(pool.count):
            np.testing.assert_array_equal(
                table[i], masked_key_chunks(pool, i, mask, chunk_bits=12))


@given(seed=st.integers(0, 2**31), chunk_bits=st.integers(1, 24))
@settings(max_examples=30)
def test_key_equality_iff_masked_strings_equal(seed, chunk_bits):
    rng = np.random.default_rng(seed)
    # Low-entropy bits so equal masked strings actually occur.
    bits = (rng.random((12, 12)) < 0.15).astype(np.uint8)
    pool = BitStringPool.from_bits(bits).partitioned(4)
    mask = (1, 3)
    table = masked_key_table(pool, mask, chunk_bits=chunk_bits)
    bounds = pool.block_bounds
    kept_cols = [t for b in range(4) if b not in mask
                 for t in range(bounds[b], bounds[b + 1])]
    for i in range(pool.count):
        for j in range(pool.count):
            same_key = bool(np.all(table[i] == table[j]))
            same_sub = bool(np.all(bits[i, kept_cols] == bits[j, kept_cols]))
            assert same_key == same_sub


def test_masked_key_full_mask_is_empty():
    pool = pool_from_strings(REFERENCE_STRINGS, k=2)
    assert masked_key_chunks(pool, 0, (0, 1)).size == 0
