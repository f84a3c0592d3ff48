"""Why allowing a few mismatched bits saves so many replicates.

A single replicate misses an edge whose bits disagree in more than d
positions.  Repeating with fresh projections drives the miss probability
down geometrically, but the base of that geometric decay depends sharply
on d: each extra allowed mismatch fattens the per-replicate catch
probability and slashes the replicate count needed for the same guarantee.
The demo tabulates both views for a typical operating point.
"""

from epsgraph import collision_prob, min_replicates, missing_edge_bound


def main():
    length = 50
    p = 0.1          # per-bit mismatch probability at the target radius
    print("per-bit mismatch p = %.2f over length = %d bits" % (p, length))

    print("\nreplicates needed for a miss bound gamma, by allowed mismatches d:")
    gammas = [1e-2, 1e-3, 1e-6, 1e-9]
    print("   d " + "".join("%10.0e" % g for g in gammas))
    for d in range(6):
        row = ["%4d " % d]
        for gamma in gammas:
            row.append("%10d" % min_replicates(length, d, p, gamma))
        print("".join(row))

    print("\nmiss bound after Q replicates at d = 2:")
    for q in [1, 2, 4, 8, 16, 32, 64]:
        print("  Q=%3d  bound %.3e" % (q, missing_edge_bound(length, 2, p, q)))

    print("\nthe same table driven from a cosine radius instead of p:")
    for epsilon in [0.01, 0.05, 0.1, 0.2]:
        pe = collision_prob(epsilon)
        q = min_replicates(length, 2, pe, 1e-6)
        print("  epsilon=%.2f -> p=%.4f -> Q=%d for gamma=1e-6"
              % (epsilon, pe, q))


if __name__ == "__main__":
    main()
