"""Shared fixtures: a hand-checkable reference pool and planted datasets."""

import numpy as np
import pytest

from epsgraph import BitStringPool

# Ten 16-bit strings containing exactly two pairs at Hamming distance <= 2:
# rows (2, 8) and (5, 9), both at distance exactly 2.  Small enough that
# every claim in the low-level tests can be verified by eye.
REFERENCE_STRINGS = [
    "1011111100111110",
    "1101011101110001",
    "1100100011011100",
    "0100000101111101",
    "1010001011101010",
    "1111001110010111",
    "0000000100111110",
    "0101100101111000",
    "1101100011011110",
    "1001001110010111",
]
REFERENCE_CLOSE_PAIRS = {(2, 8), (5, 9)}


def pool_from_strings(strings, k=None):
    """Build a pool from '0'/'1' strings, optionally partitioned into k blocks."""
    bits = np.array([[int(c) for c in s] for s in strings], dtype=np.uint8)
    pool = BitStringPool.from_bits(bits)
    return pool if k is None else pool.partitioned(k)


def random_pool(rng, n, length, k):
    bits = (rng.random((n, length)) < 0.5).astype(np.uint8)
    return BitStringPool.from_bits(bits).partitioned(k)


def hamming_oracle(strings, i, j):
    return sum(a != b for a, b in zip(strings[i], strings[j]))


def planted_clusters(n, dim, clusters, cluster_size, spread, seed):
    """Tight clusters on the unit sphere plus a diffuse background.

    The first ``clusters * cluster_size`` rows are cluster members (unit
    centers jittered by ``spread``); the rest are standard Gaussian noise.
    Returns a float32 ``(n, dim)`` array.
    """
    if clusters * cluster_size > n:
        raise ValueError("more planted rows than n")
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((clusters, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    planted = np.repeat(centers, cluster_size, axis=0)
    planted = planted + spread * rng.standard_normal(planted.shape)
    background = rng.standard_normal((n - clusters * cluster_size, dim))
    return np.vstack([planted, background]).astype(np.float32)


@pytest.fixture
def reference_pool():
    return pool_from_strings(REFERENCE_STRINGS, k=4)
