"""On-disk formats: vector datasets, bit-string pools, and edge lists.

Binary formats carry a four-byte magic tag, a version, and explicit sizes so
that truncation and type confusion fail loudly.  Edge lists are plain text —
one ``i j distance`` line per edge, 0-based, sorted — preceded by ``#``
comment lines carrying run metadata as ``key=value`` pairs.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .bitpool import BitStringPool, _pad_mask, _word_count
from .edges import EdgeList
from .errors import DataError
from .lsh import VectorDataset, as_dataset

__all__ = [
    "read_dataset",
    "read_edges",
    "read_pool",
    "write_dataset",
    "write_edges",
    "write_pool",
]

_DATASET_MAGIC = b"EPGD"
_POOL_MAGIC = b"EPGP"
_VERSION = 1
_DATASET_HEADER = struct.Struct("<4sIQQI")
_POOL_HEADER = struct.Struct("<4sIQQ")


def write_dataset(path, data) -> None:
    """Write vectors as the binary dataset format (float32, row-major)."""
    data = as_dataset(data)
    payload = np.ascontiguousarray(data.vectors, dtype="<f4")
    header = _DATASET_HEADER.pack(_DATASET_MAGIC, _VERSION, data.count,
                                  data.dim, 4)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def _read_dataset_binary(blob: bytes, path) -> VectorDataset:
    if len(blob) < _DATASET_HEADER.size:
        raise DataError(f"{path}: truncated dataset header")
    magic, version, n, dim, width = _DATASET_HEADER.unpack_from(blob)
    if version != _VERSION:
        raise DataError(f"{path}: unsupported dataset version {version}")
    if width != 4:
        raise DataError(f"{path}: unsupported element width {width}")
    expected = _DATASET_HEADER.size + n * dim * width
    if len(blob) != expected:
        raise DataError(f"{path}: payload is {len(blob)} bytes, header "
                        f"promises {expected}")
    flat = np.frombuffer(blob, dtype="<f4", offset=_DATASET_HEADER.size)
    vectors = flat.reshape(n, dim).copy()
    if vectors.size and not np.isfinite(vectors).all():
        raise DataError(f"{path}: dataset contains non-finite values")
    return VectorDataset(vectors)


def read_dataset(path) -> VectorDataset:
    """Read a dataset file; headerless CSV is auto-detected by the magic tag.

    Raises:
        DataError: corrupt header, size mismatch, non-finite values, or an
            unparseable CSV.
    """
    blob = Path(path).read_bytes()
    if blob[:4] == _DATASET_MAGIC:
        return _read_dataset_binary(blob, path)
    try:
        rows = np.loadtxt(str(path), delimiter=",", dtype=np.float64, ndmin=2)
    except (ValueError, OSError) as exc:
        raise DataError(f"{path}: neither a dataset file nor CSV ({exc})")
    return VectorDataset(rows.astype(np.float32))


def write_pool(path, pool: BitStringPool) -> None:
    """Write a pool as packed rows padded to whole bytes."""
    row_bytes = -(-pool.length // 8)
    raw = pool.words.view(np.uint8).reshape(pool.count, pool.word_count * 8)
    with open(path, "wb") as fh:
        fh.write(_POOL_HEADER.pack(_POOL_MAGIC, _VERSION, pool.count,
                                   pool.length))
        fh.write(np.ascontiguousarray(raw[:, :row_bytes]).tobytes())


def read_pool(path) -> BitStringPool:
    """Read a pool file, validating sizes and zero padding bits."""
    blob = Path(path).read_bytes()
    if blob[:4] != _POOL_MAGIC:
        raise DataError(f"{path}: not a pool file")
    if len(blob) < _POOL_HEADER.size:
        raise DataError(f"{path}: truncated pool header")
    magic, version, n, length = _POOL_HEADER.unpack_from(blob)
    if version != _VERSION:
        raise DataError(f"{path}: unsupported pool version {version}")
    if length < 1:
        raise DataError(f"{path}: pool length must be positive")
    row_bytes = -(-length // 8)
    expected = _POOL_HEADER.size + n * row_bytes
    if len(blob) != expected:
        raise DataError(f"{path}: payload is {len(blob)} bytes, header "
                        f"promises {expected}")
    raw = np.frombuffer(blob, dtype=np.uint8, offset=_POOL_HEADER.size)
    raw = raw.reshape(n, row_bytes)
    word_bytes = _word_count(length) * 8
    buf = np.zeros((n, word_bytes), dtype=np.uint8)
    buf[:, :row_bytes] = raw
    words = buf.view("<u8")
    if np.any(words[:, -1] & ~_pad_mask(length)):
        raise DataError(f"{path}: nonzero padding bits past length {length}")
    return BitStringPool(words, length, validate=False)


def _format_meta_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_meta_value(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_edges(path, edge_list: EdgeList, metadata: dict | None = None) -> None:
    """Write a sorted edge list with ``# key=value`` metadata comments.

    Distances are printed with nine digits after the point, which round-trips
    the distances of 32-bit inputs.  Everything written is a pure function of
    the edges and metadata, so identical inputs produce identical bytes.
    """
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={_format_meta_value(value)}\n")
    for (i, j), dist in zip(edge_list.pairs, edge_list.distances):
        lines.append(f"{i} {j} {dist:.9f}\n")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.writelines(lines)


def read_edges(path) -> tuple[EdgeList, dict]:
    """Parse an edge-list file back into edges plus its metadata dict.

    Raises:
        DataError: malformed lines, unsorted or duplicate pairs, or ``i >= j``.
    """
    metadata: dict = {}
    pairs = []
    dists = []
    prev = (-1, -1)
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = _parse_meta_value(value.strip())
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 'i j distance'")
            try:
                i, j, dist = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}")
            if i < 0 or j < 0 or i >= j:
                raise DataError(f"{path}:{lineno}: need 0 <= i < j")
            if (i, j) <= prev:
                raise DataError(f"{path}:{lineno}: pairs must be sorted and "
                                "unique")
            prev = (i, j)
            pairs.append((i, j))
            dists.append(dist)
    if not pairs:
        return EdgeList(), metadata
    return EdgeList(np.array(pairs, dtype=np.int64),
                    np.array(dists, dtype=np.float64)), metadata
