"""Tour of the command-line toolkit on a small generated dataset.

Each step prints the command line it runs, then the JSON record the command
emits.  Everything happens inside a temporary directory; the records chain
together the same way they would in a shell pipeline: build a graph, scan
the exact reference, diff the two, inspect the tuner's choices, and dump a
raw bit pool.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from epsgraph import cli, write_dataset


def run(argv):
    print("\n$ epsgraph " + " ".join(argv))
    code = cli.main(argv)
    if code != 0:
        raise SystemExit("exit code %d" % code)


def main():
    epsilon = 1.0 - math.cos(0.1 * math.pi)
    rng = np.random.default_rng(3)
    centers = rng.standard_normal((12, 32))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    rows = np.repeat(centers, 50, axis=0)
    rows = rows + 0.015 * rng.standard_normal(rows.shape)
    noise = rng.standard_normal((2400, 32))
    data = np.vstack([rows, noise]).astype(np.float32)

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        src = root / "points.bin"
        write_dataset(src, data)
        print("wrote %d x %d float32 dataset to %s"
              % (data.shape[0], data.shape[1], src))

        run(["estimate", str(src), "--epsilon", "%.6f" % epsilon,
             "--gamma", "1e-3", "--sample-pairs", "200000"])

        run(["build", str(src), "-o", str(root / "graph.txt"),
             "--epsilon", "%.6f" % epsilon, "--gamma", "1e-3"])

        run(["oracle", str(src), "-o", str(root / "exact.txt"),
             "--epsilon", "%.6f" % epsilon])

        run(["compare", str(root / "graph.txt"), str(root / "exact.txt")])

        run(["project", str(src), "-o", str(root / "bits.pool"),
             "--length", "32", "--seed", "7"])

        print("\nfirst lines of the edge file:")
        for line in (root / "graph.txt").read_text().splitlines()[:6]:
            print("  " + line)


if __name__ == "__main__":
    main()
