"""Random projections, cosine geometry, and the bit-flip probability."""

import math

import numpy as np
import pytest

from epsgraph import (
    DataError,
    ProjectionSpec,
    VectorDataset,
    angle,
    center_normalize,
    collision_prob,
    cosine_distance,
    project,
)
from epsgraph.lsh import (
    _project_words,
    cosine_radius_from_euclidean,
    euclidean_radius,
)


# ----------------------------------------------------------------- geometry

def test_cosine_distance_landmarks():
    assert cosine_distance([1.0, 0.0], [3.0, 0.0]) == 0.0
    assert cosine_distance([1.0, 0.0], [0.0, 2.0]) == pytest.approx(1.0)
    assert cosine_distance([1.0, 0.0], [-5.0, 0.0]) == pytest.approx(2.0)
    # Scale invariance.
    x, y = [0.3, -1.2, 0.7], [2.0, 0.1, -0.4]
    assert cosine_distance(x, y) == pytest.approx(
        cosine_distance(np.multiply(x, 7.5), np.multiply(y, 0.01)))


def test_angle_landmarks():
    assert angle([1.0, 0.0], [1.0, 1.0]) == pytest.approx(math.pi / 4)
    assert angle([1.0, 0.0], [1.0, 0.0]) == 0.0
    assert angle([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(math.pi)


def test_collision_prob_is_angle_over_pi():
    assert collision_prob(0.0) == 0.0
    assert collision_prob(1.0) == pytest.approx(0.5)
    for theta in (0.05 * math.pi, 0.1 * math.pi, 0.4 * math.pi):
        eps = 1.0 - math.cos(theta)
        assert collision_prob(eps) == pytest.approx(theta / math.pi)


def test_collision_prob_rejects_out_of_range():
    with pytest.raises(ValueError):
        collision_prob(-0.01)
    with pytest.raises(ValueError):
        collision_prob(1.01)


def test_radius_conversions_round_trip():
    for eps in (0.01, 0.2, 0.97):
        r = euclidean_radius(eps)
        assert r == pytest.approx(math.sqrt(2 * eps))
        assert cosine_radius_from_euclidean(r) == pytest.approx(eps)


# ------------------------------------------------------------------ dataset

def test_dataset_validates_rows():
    with pytest.raises(DataError, match="row 1"):
        VectorDataset(np.array([[1.0, 2.0], [np.nan, 0.0]], dtype=np.float32))
    with pytest.raises(DataError):
        VectorDataset(np.array([[np.inf, 0.0]], dtype=np.float32))


def test_projection_rejects_zero_rows():
    data = np.array([[1.0, 1.0], [0.0, 0.0]], dtype=np.float32)
    with pytest.raises(DataError, match="row 1"):
        project(data, ProjectionSpec(length=8))


def test_center_normalize():
    rng = np.random.default_rng(0)
    data = rng.standard_normal((40, 5)).astype(np.float32) + 3.0
    out = center_normalize(data)
    np.testing.assert_allclose(
        np.linalg.norm(out.vectors, axis=1), 1.0, rtol=1e-5)
    assert abs(out.vectors.mean()) < 0.2  # column means removed before scaling


# --------------------------------------------------------------- projection

def test_projection_is_deterministic():
    rng = np.random.default_rng(5)
    data = rng.standard_normal((30, 6)).astype(np.float32)
    spec = ProjectionSpec(length=64, seed=9, replicate_id=3)
    a = project(data, spec)
    b = project(data, spec)
    np.testing.assert_array_equal(a.words, b.words)


def test_replicates_differ():
    rng = np.random.default_rng(5)
    data = rng.standard_normal((30, 6)).astype(np.float32)
    one = project(data, ProjectionSpec(length=64, seed=9, replicate_id=1))
    two = project(data, ProjectionSpec(length=64, seed=9, replicate_id=2))
    other_seed = project(data, ProjectionSpec(length=64, seed=10, replicate_id=1))
    assert np.any(one.words != two.words)
    assert np.any(one.words != other_seed.words)


def test_row_subset_projection_matches_full():
    # Streaming deduplication regenerates single rows; their bits must agree
    # with the full-pool projection bit for bit.
    rng = np.random.default_rng(17)
    data = np.ascontiguousarray(rng.standard_normal((50, 7)))
    spec = ProjectionSpec(length=100, seed=2, replicate_id=4)
    full = _project_words(data, spec)
    rows = np.array([0, 3, 3, 49, 17], dtype=np.int64)
    subset = _project_words(data, spec, rows=rows)
    np.testing.assert_array_equal(subset, full[rows])


def test_sign_convention():
    # Antipodal points disagree in every bit (a zero dot product has
    # probability zero); identical points agree in every bit.
    data = np.array([[1.0, 2.0], [-1.0, -2.0], [2.0, 4.0]], dtype=np.float32)
    pool = project(data, ProjectionSpec(length=96))
    bits = pool.to_bits()
    assert np.all(bits[0] != bits[1])
    np.testing.assert_array_equal(bits[0], bits[2])


def test_bit_flip_rate_tracks_angle():
    # The per-bit disagreement probability is angle / pi; with 20000 bits the
    # observed rate should sit well within 4 binomial standard deviations.
    length = 20000
    for theta in (0.1 * math.pi, 0.25 * math.pi):
        data = np.array([[1.0, 0.0],
                         [math.cos(theta), math.sin(theta)]], dtype=np.float32)
        pool = project(data, ProjectionSpec(length=length, seed=1))
        from epsgraph import hamming_distance
        rate = hamming_distance(pool, 0, 1) / length
        p = theta / math.pi
        sigma = math.sqrt(p * (1 - p) / length)
        assert abs(rate - p) < 4 * sigma


def test_projection_block_streaming_is_seamless():
    # Forcing tiny generator blocks must not change a single bit.
    import epsgraph.lsh as lsh
    rng = np.random.default_rng(23)
    data = np.ascontiguousarray(rng.standard_normal((10, 13)))
    spec = ProjectionSpec(length=257, seed=6, replicate_id=2)
    expect = _project_words(data, spec)
    saved = lsh._DEFAULT_BLOCK_ELEMS
    try:
        lsh._DEFAULT_BLOCK_ELEMS = 16
        np.testing.assert_array_equal(_project_words(data, spec), expect)
    finally:
        lsh._DEFAULT_BLOCK_ELEMS = saved
