import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from gridshift.grid import (
    CellTables,
    PointSet,
    bin_point,
    bin_points,
    build_cell_tables,
    neighbor_aggregate,
    _neighbor_stats_cells,
    _tables_from_data,
)


def brute_force_tables(data, h):
    """Linear-scan recount: cell -> (count, sum) built point by point."""
    count = {}
    total = {}
    for row in data:
        g = bin_point(row, h)
        count[g] = count.get(g, 0) + 1
        total[g] = total.get(g, np.zeros(len(row))) + row
    return count, total


def brute_force_neighborhood(data, h, g):
    """Count/sum over points whose bin is within Chebyshev distance 1 of g."""
    g = np.asarray(g)
    cells = np.stack([np.asarray(bin_point(row, h)) for row in data])
    mask = (np.abs(cells - g) <= 1).all(axis=1)
    return int(mask.sum()), data[mask].sum(axis=0) if mask.any() else np.zeros(len(g))


# ---------------------------------------------------------------- bin_point

def test_bin_point_floors_toward_minus_infinity():
    assert bin_point([2.5, -0.1], 1.0) == (2, -1)


def test_bin_point_origin():
    assert bin_point([0.0, 0.0, 0.0], 0.5) == (0, 0, 0)


def test_bin_point_three_axes():
    assert bin_point([3.7, 4.2, 5.9], 2.0) == (1, 2, 2)


def test_bin_point_boundary_goes_to_higher_cell():
    # x/h integral: the point sits on the closed lower face of cell 2
    assert bin_point([1.0], 0.5) == (2,)
    assert bin_point([-1.0], 0.5) == (-2,)


def test_bin_point_rejects_bad_bandwidth():
    with pytest.raises(ValueError):
        bin_point([1.0], 0.0)
    with pytest.raises(ValueError):
        bin_point([1.0], -2.0)


def test_bin_point_rejects_non_finite():
    with pytest.raises(ValueError):
        bin_point([np.nan], 1.0)
    with pytest.raises(ValueError):
        bin_point([np.inf, 0.0], 1.0)


@given(
    h=st.sampled_from([0.5, 1.0, 2.0]),
    point=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=4),
    k=st.lists(st.integers(-1000, 1000), min_size=1, max_size=4),
)
def test_bin_translation_covariance(h, point, k):
    # bin(p + h*k) = bin(p) + k for integer k; keep quotients away from
    # cell boundaries so float rounding cannot flip the floor
    d = min(len(point), len(k))
    point, k = point[:d], k[:d]
    q = np.array(point) / h
    assume(np.min(np.abs(q - np.round(q))) > 1e-6)
    shifted = [p + h * kk for p, kk in zip(point, k)]
    sq = np.array(shifted) / h
    assume(np.min(np.abs(sq - np.round(sq))) > 1e-6)
    base = bin_point(point, h)
    moved = bin_point(shifted, h)
    assert moved == tuple(b + kk for b, kk in zip(base, k))


# ---------------------------------------------------------- build_cell_tables

def test_tables_singleton():
    t = build_cell_tables(PointSet(np.array([[0.3, 0.3]])), 1.0)
    assert t.count == {(0, 0): 1}
    np.testing.assert_allclose(t.sum[(0, 0)], [0.3, 0.3])


def test_tables_three_points_two_cells():
    pts = PointSet(np.array([[0.1], [0.9], [1.1]]))
    t = build_cell_tables(pts, 1.0)
    assert t.count == {(0,): 2, (1,): 1}
    np.testing.assert_allclose(t.sum[(0,)], [1.0])
    np.testing.assert_allclose(t.sum[(1,)], [1.1])


def test_tables_match_brute_force_on_random_3d():
    rng = np.random.default_rng(7)
    data = rng.uniform(0, 1, size=(1000, 3))
    h = 0.25
    t = build_cell_tables(PointSet(data), h)
    count, total = brute_force_tables(data, h)
    assert t.count == count
    for g, s in total.items():
        np.testing.assert_allclose(t.sum[g], s, rtol=1e-9)
    # invariants: identical key sets, counts >= 1, mass conservation,
    # per-cell mean inside the closed cell cube
    assert set(t.count) == set(t.sum)
    assert all(c >= 1 for c in t.count.values())
    assert sum(t.count.values()) == 1000
    for g in t.count:
        mean = t.sum[g] / t.count[g]
        lo = np.array(g) * h
        assert np.all(mean >= lo - 1e-12) and np.all(mean <= lo + h + 1e-12)


def test_tables_negative_coordinates():
    data = np.array([[-0.1, -0.1], [-0.9, -1.5]])
    t = build_cell_tables(PointSet(data), 1.0)
    assert t.count == {(-1, -1): 1, (-1, -2): 1}


@given(
    seed=st.integers(0, 10_000),
    n=st.integers(1, 200),
    d=st.integers(1, 4),
    h=st.floats(0.05, 3.0),
)
def test_mass_conservation(seed, n, d, h):
    rng = np.random.default_rng(seed)
    data = rng.normal(0, 2, size=(n, d))
    t = build_cell_tables(PointSet(data), h)
    assert int(t.counts.sum()) == n


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet(np.empty((0, 2)))
    with pytest.raises(ValueError):
        PointSet(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        PointSet(np.array([[1.0, np.nan]]))


# ---------------------------------------------------------- neighbor_aggregate

def test_neighbor_aggregate_single_point():
    t = build_cell_tables(PointSet(np.array([[0.4, 0.6]])), 1.0)
    count, total = neighbor_aggregate(t, (0, 0))
    assert count == 1
    np.testing.assert_allclose(total, [0.4, 0.6])


def test_neighbor_aggregate_outside_3x3():
    t = build_cell_tables(PointSet(np.array([[0.4, 0.6]])), 1.0)
    count, total = neighbor_aggregate(t, (2, 2))
    assert count == 0
    np.testing.assert_array_equal(total, [0.0, 0.0])


def test_neighbor_aggregate_dimension_mismatch():
    t = build_cell_tables(PointSet(np.array([[0.4, 0.6]])), 1.0)
    with pytest.raises(ValueError):
        neighbor_aggregate(t, (0, 0, 0))


def test_neighbor_aggregate_matches_linear_scan():
    rng = np.random.default_rng(11)
    data = rng.normal(0, 1, size=(300, 2))
    h = 0.4
    t = build_cell_tables(PointSet(data), h)
    for g in itertools.islice(t.count, 25):
        count, total = neighbor_aggregate(t, g)
        ref_count, ref_sum = brute_force_neighborhood(data, h, g)
        assert count == ref_count
        np.testing.assert_allclose(total, ref_sum, rtol=1e-9, atol=1e-12)


@given(seed=st.integers(0, 10_000), d=st.integers(1, 3))
def test_exact_oracle_property(seed, d):
    # for every point, the aggregate at its own cell equals the linear
    # scan over all points within Chebyshev cell distance 1: counts
    # bitwise, sums to summation-order tolerance
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 80))
    data = rng.normal(0, 1.5, size=(n, d))
    h = float(rng.uniform(0.2, 2.0))
    t = build_cell_tables(PointSet(data), h)
    cells = bin_points(data, h)
    for i in range(min(n, 20)):
        count, total = neighbor_aggregate(t, tuple(cells[i]))
        mask = (np.abs(cells - cells[i]) <= 1).all(axis=1)
        assert count == int(mask.sum())
        np.testing.assert_allclose(total, data[mask].sum(axis=0), rtol=1e-9, atol=1e-12)


# ------------------------------------------------------- vectorized internals

def test_batch_neighbor_stats_agrees_with_single_queries():
    rng = np.random.default_rng(3)
    data = rng.normal(0, 1, size=(500, 3))
    tables, inverse = _tables_from_data(data, 0.5)
    counts, sums = _neighbor_stats_cells(tables)
    for row in range(tables.cells.shape[0]):
        c, s = neighbor_aggregate(tables, tuple(tables.cells[row]))
        assert counts[row] == c
        np.testing.assert_allclose(sums[row], s, rtol=1e-9, atol=1e-12)
    assert inverse.shape == (500,)


def test_keyed_and_fallback_paths_agree():
    rng = np.random.default_rng(5)
    data = rng.normal(0, 1, size=(200, 2))
    tables, _ = _tables_from_data(data, 0.3)
    assert tables._keys is not None
    counts_fast, sums_fast = _neighbor_stats_cells(tables)
    fallback = CellTables(cells=tables.cells, counts=tables.counts,
                          sums=tables.sums, h=tables.h, n=tables.n)
    counts_slow, sums_slow = _neighbor_stats_cells(fallback)
    np.testing.assert_array_equal(counts_fast, counts_slow)
    np.testing.assert_allclose(sums_fast, sums_slow, rtol=1e-12)


def test_huge_coordinate_range_uses_fallback():
    # spread in every axis large enough to overflow the int64 key encoding
    base = np.array([[0.0] * 4, [1e17] * 4, [2e17] * 4])
    tables, _ = _tables_from_data(base, 1.0)
    assert tables._keys is None
    counts, sums = _neighbor_stats_cells(tables)
    np.testing.assert_array_equal(counts, [1, 1, 1])


def test_bandwidth_too_small_for_range_raises():
    with pytest.raises(ValueError):
        bin_points(np.array([[1e30]]), 1e-8)
