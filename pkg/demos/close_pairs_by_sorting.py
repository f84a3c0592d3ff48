"""Walk through the blockwise close-pair search on ten tiny bit strings.

The pool below hides exactly two pairs at Hamming distance <= 2.  With the
strings cut into 4 blocks, any pair within distance 2 must agree on at least
2 blocks, so it collides under one of the C(4,2) = 6 block masks.  The demo
prints every mask, the groups it forms, and the pairs that survive the exact
distance check, then cross-checks the result against brute force.
"""

import itertools

import numpy as np

from epsgraph import (
    BitStringPool,
    brute_force_hamming,
    enumerate_pairs,
    hamming_distance,
    mask_count,
    masked_key_table,
)

STRINGS = [
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


def masks_with_groups(pool, d):
    k = pool.block_count
    print("%d strings of length %d, %d blocks, distance <= %d"
          % (pool.count, pool.length, k, d))
    print("masks to scan: C(%d,%d) = %d" % (k, d, mask_count(k, d)))
    for dropped in itertools.combinations(range(k), d):
        kept = [b for b in range(k) if b not in dropped]
        keys = masked_key_table(pool, dropped)
        order = np.lexsort(keys.T[::-1])
        print("\n  kept blocks %s -> sorted keys" % kept)
        last = None
        for row in order:
            key = tuple(int(c) for c in keys[row])
            tag = "|" if key == last else " "
            print("    %s row %d  key %s" % (tag, row, key))
            last = key


def main():
    bits = np.array([[int(c) for c in s] for s in STRINGS], dtype=np.uint8)
    pool = BitStringPool.from_bits(bits).partitioned(4)
    masks_with_groups(pool, d=2)

    found = enumerate_pairs(pool, 2)
    print("\npairs within distance 2:")
    for i, j in sorted(found.to_set()):
        print("  (%d, %d)  distance %d  %s / %s"
              % (i, j, hamming_distance(pool, i, j), STRINGS[i], STRINGS[j]))

    brute = brute_force_hamming(pool, 2)
    print("matches brute force over all %d pairs: %s"
          % (pool.count * (pool.count - 1) // 2, found == brute))


if __name__ == "__main__":
    main()
