"""Sign-random-projection hashing and the cosine metric.

Each output bit is the sign of a dot product with an independent standard
Gaussian direction, so for any fixed pair of vectors the per-bit mismatch
probability equals ``angle / pi``.  Projections are generated from a counter
based seed scheme: ``(seed, replicate_id)`` fully determines the projection
matrix, and bits are reproducible bit-for-bit across runs, platforms, and
worker counts (the dot products use a fixed summation order rather than a
BLAS call precisely for this reason).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .bitpool import BitStringPool
from .errors import DataError

__all__ = [
    "ProjectionSpec",
    "VectorDataset",
    "angle",
    "as_dataset",
    "center_normalize",
    "collision_prob",
    "cosine_distance",
    "cosine_radius_from_euclidean",
    "euclidean_radius",
    "project",
]

_DEFAULT_BLOCK_ELEMS = 1 << 22  # projection column block sizing: n * cols


class VectorDataset:
    """Dense real vectors, one per row.

    Attributes:
        vectors: ``(count, dim)`` float array (kept in the caller's dtype).
    """

    __slots__ = ("vectors",)

    def __init__(self, vectors):
        arr = np.asarray(vectors)
        if arr.ndim != 2:
            raise DataError("vectors must form a 2-D array")
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        if arr.size and not np.isfinite(arr).all():
            bad = int(np.argwhere(~np.isfinite(arr).all(axis=1))[0, 0])
            raise DataError(f"row {bad} has a non-finite entry")
        self.vectors = arr

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"VectorDataset(count={self.count}, dim={self.dim})"


def as_dataset(data) -> VectorDataset:
    """Coerce an array-like (or pass through a dataset) with validation."""
    if isinstance(data, VectorDataset):
        return data
    return VectorDataset(data)


@dataclass(frozen=True)
class ProjectionSpec:
    """Identity of one projection replicate.

    ``(seed, replicate_id)`` fully determines the Gaussian directions; the
    pipeline uses replicate ids 1..Q (id 0 is reserved for sampling work).
    """
    length: int
    seed: int = 0
    replicate_id: int = 1

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("projection length must be >= 1")
        if self.replicate_id < 0:
            raise ValueError("replicate_id must be non-negative")


@numba.njit(cache=True, nogil=True)
def _sign_bits(x, r):
    """Bits of sign(x @ r.T) with a fixed accumulation order.

    x: (n, dim) float64, r: (cols, dim) float64 -> (n, cols) uint8 where the
    bit is 1 exactly when the dot product is strictly positive.
    """
    n, dim = x.shape
    cols = r.shape[0]
    out = np.zeros((n, cols), dtype=np.uint8)
    for i in range(n):
        for t in range(cols):
            acc = 0.0
            for q in range(dim):
                acc += x[i, q] * r[t, q]
            if acc > 0.0:
                out[i, t] = 1
    return out


def _rng_for(spec: ProjectionSpec) -> np.random.Generator:
    ss = np.random.SeedSequence([int(spec.seed), int(spec.replicate_id)])
    return np.random.Generator(np.random.PCG64(ss))


def _check_norms(x: np.ndarray) -> None:
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    if np.any(norms == 0.0):
        bad = int(np.argmin(norms))
        raise DataError(f"row {bad} has zero norm and cannot be projected")


def _project_words(x: np.ndarray, spec: ProjectionSpec,
                   rows: np.ndarray | None = None) -> np.ndarray:
    """Packed projection bits for all rows (or a row subset) of ``x``.

    The Gaussian directions are drawn in fixed column blocks from the spec's
    generator, so a subset projection matches the corresponding rows of the
    full projection exactly.
    """
    if rows is not None:
        x = x[rows]
    n = x.shape[0]
    length = spec.length
    rng = _rng_for(spec)
    bits = np.empty((n, length), dtype=np.uint8)
    block = max(1, min(length, _DEFAULT_BLOCK_ELEMS // max(n, 1)))
    for lo in range(0, length, block):
        hi = min(lo + block, length)
        directions = rng.standard_normal((hi - lo, x.shape[1]))
        bits[:, lo:hi] = _sign_bits(x, directions)
    return BitStringPool.from_bits(bits).words


def project(data, spec: ProjectionSpec) -> BitStringPool:
    """Map every vector to a ``spec.length``-bit string of projection signs.

    Bit ``(i, t)`` is 1 exactly when the dot product of row ``i`` with the
    t-th Gaussian direction is strictly positive (ties at zero produce 0).

    Args:
        data: dataset or ``(n, dim)`` array; rows must have positive norm.
        spec: projection identity (length, seed, replicate id).

    Returns:
        :class:`BitStringPool` with ``n`` rows of ``spec.length`` bits.

    Raises:
        DataError: on a zero-norm row (the message names the row).
    """
    data = as_dataset(data)
    if data.count == 0:
        raise DataError("cannot project an empty dataset")
    x = np.ascontiguousarray(data.vectors, dtype=np.float64)
    _check_norms(x)
    words = _project_words(x, spec)
    return BitStringPool(words, spec.length, validate=False)


def cosine_distance(x, y) -> float:
    """``1 - cos(angle(x, y))``, clamped to [0, 2] against rounding."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx = math.sqrt(float(np.dot(x, x)))
    ny = math.sqrt(float(np.dot(y, y)))
    if nx == 0.0 or ny == 0.0:
        raise DataError("cosine distance undefined for zero-norm input")
    d = 1.0 - float(np.dot(x, y)) / (nx * ny)
    return min(max(d, 0.0), 2.0)


def angle(x, y) -> float:
    """Angle between two vectors in radians, in [0, pi]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx = math.sqrt(float(np.dot(x, x)))
    ny = math.sqrt(float(np.dot(y, y)))
    if nx == 0.0 or ny == 0.0:
        raise DataError("angle undefined for zero-norm input")
    c = float(np.dot(x, y)) / (nx * ny)
    return math.acos(min(max(c, -1.0), 1.0))


def collision_prob(epsilon: float) -> float:
    """Per-bit mismatch probability of a pair at cosine distance ``epsilon``.

    ``p = arccos(1 - epsilon) / pi``; valid for radii up to 1 (angles up to a
    right angle).  Larger radii put the method outside its useful regime and
    are rejected.
    """
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return math.acos(1.0 - epsilon) / math.pi


def euclidean_radius(epsilon: float) -> float:
    """Euclidean radius on unit-norm vectors matching cosine radius ``epsilon``."""
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    return math.sqrt(2.0 * epsilon)


def cosine_radius_from_euclidean(radius: float) -> float:
    """Inverse of :func:`euclidean_radius`."""
    if radius < 0.0:
        raise ValueError("radius must be non-negative")
    return radius * radius / 2.0


def center_normalize(data) -> VectorDataset:
    """Subtract the column means, then scale every row to unit norm.

    Returns a new float64 dataset; raises :class:`DataError` if centering
    collapses a row to zero.
    """
    data = as_dataset(data)
    x = data.vectors.astype(np.float64) - data.vectors.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    if np.any(norms == 0.0):
        bad = int(np.argmin(norms))
        raise DataError(f"row {bad} is the column mean; cannot normalize")
    return VectorDataset(x / norms[:, None])
