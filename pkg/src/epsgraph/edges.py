"""Weighted edge lists shared by the builder, the reference paths, and I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["EdgeList"]


@dataclass
class EdgeList:
    """Edges ``(i, j)`` with ``i < j`` plus their distances, sorted by pair.

    Attributes:
        pairs: ``(m, 2)`` int64 array, lexicographically sorted, unique.
        distances: ``(m,)`` float64 array aligned with ``pairs``.
    """
    pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2), np.int64))
    distances: np.ndarray = field(default_factory=lambda: np.empty(0, np.float64))

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.distances = np.asarray(self.distances, dtype=np.float64).ravel()
        if self.pairs.shape[0] != self.distances.shape[0]:
            raise ValueError("pairs and distances must have equal length")

    @classmethod
    def from_rows(cls, rows) -> "EdgeList":
        """Build from an iterable of ``(i, j, distance)`` rows, sorting them."""
        rows = list(rows)
        if not rows:
            return cls()
        pairs = np.array([(r[0], r[1]) for r in rows], dtype=np.int64)
        dists = np.array([r[2] for r in rows], dtype=np.float64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return cls(pairs[order], dists[order])

    def to_pair_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.pairs}

    def as_tuples(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(d))
                for (i, j), d in zip(self.pairs, self.distances)]

    def __len__(self) -> int:
        return self.pairs.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeList):
            return NotImplemented
        return (self.pairs.shape == other.pairs.shape
                and bool(np.all(self.pairs == other.pairs))
                and bool(np.all(self.distances == other.distances)))
