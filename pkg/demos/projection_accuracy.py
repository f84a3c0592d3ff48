"""How many projection bits does a reliable angle estimate need?

Each random-hyperplane bit disagrees between two vectors with probability
angle/pi.  The demo projects vector pairs at known angles with increasing
bit counts and prints the observed mismatch fraction next to the target,
so you can watch the 1/sqrt(length) error bar shrink.
"""

import math

import numpy as np

from epsgraph import ProjectionSpec, hamming_distance, project


def pair_at_angle(theta):
    return np.array([[1.0, 0.0], [math.cos(theta), math.sin(theta)]])


def main():
    angles = [0.05 * math.pi, 0.1 * math.pi, 0.25 * math.pi, 0.5 * math.pi]
    lengths = [64, 256, 1024, 4096, 16384, 65536]

    print("target = angle/pi, each cell is the observed mismatch fraction")
    header = "angle/pi " + "".join("%9d" % l for l in lengths)
    print(header)
    print("-" * len(header))
    for theta in angles:
        p = theta / math.pi
        row = ["%8.3f " % p]
        for length in lengths:
            pool = project(pair_at_angle(theta), ProjectionSpec(length, seed=1))
            row.append("%9.4f" % (hamming_distance(pool, 0, 1) / length))
        print("".join(row))

    print()
    print("3-sigma bands at the largest length:")
    length = lengths[-1]
    for theta in angles:
        p = theta / math.pi
        sigma = math.sqrt(p * (1 - p) / length)
        pool = project(pair_at_angle(theta), ProjectionSpec(length, seed=1))
        got = hamming_distance(pool, 0, 1) / length
        print("  p=%.3f  observed %.4f  band +-%.4f  %s"
              % (p, got, 3 * sigma,
                 "inside" if abs(got - p) <= 3 * sigma else "OUTSIDE"))


if __name__ == "__main__":
    main()
