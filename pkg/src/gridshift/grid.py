"""Spatial hashing of points into axis-aligned hypercube cells of edge h.

The cell coordinate of a point is the elementwise mathematical floor of
point/h (toward minus infinity), so negative data bins the same way as
shifted positive data.  Occupied cells carry a point count and a
coordinate sum; one mean-shift move for a point is the aggregate of the
3^d cells around its own cell, which is what makes the grid engine linear
in the number of points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

GridIndex = tuple[int, ...]

# Lattice coordinates beyond this no longer fit the int64 key arithmetic.
_COORD_LIMIT = 2**62


def _check_bandwidth(h: float) -> float:
    h = float(h)
    if not math.isfinite(h) or h <= 0.0:
        raise ValueError(f"bandwidth must be a positive finite real, got {h!r}")
    return h


@dataclass
class PointSet:
    """n points in d-dimensional real feature space, row-indexed.

    Entries must be finite; n >= 1 and d >= 1.  `data` is normalized to a
    C-contiguous float64 (n, d) array on construction.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"point data must be 2-d (n, d), got shape {data.shape}")
        n, d = data.shape
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("point data contains NaN or infinite entries")
        self.data = data

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def bin_point(point, h: float) -> GridIndex:
    """Cell coordinate of a single point: floor(point[k] / h) per axis.

    Floor is toward minus infinity.  A coordinate exactly on a cell
    boundary (point[k]/h integral in floating point) belongs to the
    higher cell.
    """
    h = _check_bandwidth(h)
    point = np.asarray(point, dtype=np.float64)
    if point.ndim != 1:
        raise ValueError(f"point must be a flat vector, got shape {point.shape}")
    if not np.isfinite(point).all():
        raise ValueError("point has NaN or infinite coordinates")
    return tuple(int(math.floor(v / h)) for v in point)


def bin_points(data: np.ndarray, h: float) -> np.ndarray:
    """Vectorized cell coordinates for an (n, d) array, as int64 (n, d)."""
    h = _check_bandwidth(h)
    q = np.floor(data / h)
    if q.size and np.abs(q).max() >= _COORD_LIMIT:
        raise ValueError("cell coordinates exceed the supported integer lattice; "
                         "bandwidth is too small for this coordinate range")
    return q.astype(np.int64)


@dataclass
class CellTables:
    """Count and coordinate-sum tables over the occupied cells of a grid.

    `cells` holds the k occupied lattice coordinates (lexicographically
    sorted), `counts[i] >= 1` the number of points in cells[i], and
    `sums[i]` their coordinate-wise sum.  Empty cells are absent, never
    stored as zero.
    """

    cells: np.ndarray   # (k, d) int64
    counts: np.ndarray  # (k,) int64
    sums: np.ndarray    # (k, d) float64
    h: float
    n: int

    # int64 scalar keys for the occupied cells plus the per-axis strides
    # used to derive them; None when the coordinate range forced the
    # tuple-keyed fallback.
    _keys: np.ndarray | None = field(default=None, repr=False)
    _strides: np.ndarray | None = field(default=None, repr=False)
    _cell_index: dict | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.cells.shape[1]

    @property
    def index(self) -> dict[GridIndex, int]:
        """Occupied cell -> row, built lazily."""
        if self._cell_index is None:
            self._cell_index = {tuple(row): i for i, row in enumerate(self.cells.tolist())}
        return self._cell_index

    @property
    def count(self) -> dict[GridIndex, int]:
        """Cell -> point count, as a plain dict (test/inspection view)."""
        return {g: int(self.counts[i]) for g, i in self.index.items()}

    @property
    def sum(self) -> dict[GridIndex, np.ndarray]:
        """Cell -> coordinate sum, as a plain dict (test/inspection view)."""
        return {g: self.sums[i].copy() for g, i in self.index.items()}

    def count_of(self, g: GridIndex) -> int:
        i = self.index.get(tuple(int(c) for c in g))
        return 0 if i is None else int(self.counts[i])


def _cell_keys(cells: np.ndarray):
    """Collision-free int64 scalar key per cell row, or None on overflow.

    Keys are a mixed-radix encoding padded by one cell on every side, so
    key(g + v) = key(g) + dot(v, strides) stays injective for all offsets
    v in {-1,0,1}^d.  Returns (keys, strides) with keys following the
    lexicographic order of the cell coordinates.
    """
    lo = cells.min(axis=0)
    shifted = cells - lo + 1            # room for the -1 neighbor offset
    extents = shifted.max(axis=0) + 2   # and for the +1 offset
    total = 1
    for e in extents.tolist():
        total *= e
        if total >= _COORD_LIMIT:       # headroom so key + delta cannot wrap
            return None
    strides = np.empty(len(extents), dtype=np.int64)
    acc = 1
    for j in range(len(extents) - 1, -1, -1):
        strides[j] = acc
        acc *= int(extents[j])
    return shifted @ strides, strides


def _group_cells(cells: np.ndarray):
    """Group identical cell rows.

    Returns (uniq_cells, inverse, counts, keys, strides); keys/strides are
    None when the int64 encoding would overflow and grouping fell back to
    row-wise unique.  uniq_cells is lexicographically sorted either way.
    """
    keyed = _cell_keys(cells)
    if keyed is not None:
        keys, strides = keyed
        uniq_keys, first, inverse, counts = np.unique(
            keys, return_index=True, return_inverse=True, return_counts=True)
        return cells[first], inverse.reshape(-1), counts, uniq_keys, strides
    uniq, inverse, counts = np.unique(
        cells, axis=0, return_inverse=True, return_counts=True)
    return uniq, inverse.reshape(-1), counts, None, None


def _tables_from_data(data: np.ndarray, h: float):
    """Build CellTables for raw (n, d) data; also returns the per-point
    row index into the tables (used by the vectorized shift step)."""
    cells = bin_points(data, h)
    uniq, inverse, counts, keys, strides = _group_cells(cells)
    k, d = uniq.shape
    sums = np.empty((k, d), dtype=np.float64)
    for j in range(d):
        sums[:, j] = np.bincount(inverse, weights=data[:, j], minlength=k)
    tables = CellTables(cells=uniq, counts=counts.astype(np.int64), sums=sums,
                        h=float(h), n=data.shape[0], _keys=keys, _strides=strides)
    return tables, inverse


def build_cell_tables(points: PointSet, h: float) -> CellTables:
    """Single pass over the points: per-cell count and coordinate sum."""
    tables, _ = _tables_from_data(points.data, h)
    return tables


_OFFSETS_CACHE: dict[int, np.ndarray] = {}


def _offsets(d: int) -> np.ndarray:
    """The 3^d neighbor offsets in {-1,0,1}^d, lexicographic order."""
    got = _OFFSETS_CACHE.get(d)
    if got is None:
        got = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)
        _OFFSETS_CACHE[d] = got
    return got


def neighbor_aggregate(tables: CellTables, g) -> tuple[int, np.ndarray]:
    """Count and coordinate sum over the 3^d cells centered on g.

    Absent cells contribute nothing; the tables are not modified.
    """
    g = tuple(int(c) for c in g)
    if len(g) != tables.d:
        raise ValueError(f"query cell has dimension {len(g)}, tables have {tables.d}")
    index = tables.index
    total = 0
    acc = np.zeros(tables.d, dtype=np.float64)
    for v in itertools.product((-1, 0, 1), repeat=tables.d):
        row = index.get(tuple(gi + vi for gi, vi in zip(g, v)))
        if row is not None:
            total += int(tables.counts[row])
            acc += tables.sums[row]
    return total, acc


def _neighbor_stats_cells(tables: CellTables) -> tuple[np.ndarray, np.ndarray]:
    """3^d-neighborhood count and sum for every occupied cell at once.

    Returns (counts (k,), sums (k, d)).  Uses key arithmetic when the
    int64 encoding is available; otherwise walks the cell index.
    """
    k, d = tables.cells.shape
    nbr_counts = np.zeros(k, dtype=np.int64)
    nbr_sums = np.zeros((k, d), dtype=np.float64)
    if tables._keys is not None:
        keys = tables._keys
        deltas = _offsets(d) @ tables._strides
        m = len(deltas)
        # all k*3^d neighbor queries in one searchsorted, sliced so the
        # scratch arrays stay a few MB at most
        step = max(1, int(4e6) // m)
        for lo in range(0, k, step):
            hi = min(lo + step, k)
            queries = (keys[lo:hi, None] + deltas[None, :]).ravel()
            pos = np.minimum(np.searchsorted(keys, queries), k - 1)
            hit = keys[pos] == queries
            rows = pos[hit]
            src = lo + np.nonzero(hit)[0] // m
            nbr_counts[lo:hi] = np.bincount(
                src - lo, weights=tables.counts[rows],
                minlength=hi - lo).astype(np.int64)
            for j in range(d):
                nbr_sums[lo:hi, j] = np.bincount(
                    src - lo, weights=tables.sums[rows, j], minlength=hi - lo)
        return nbr_counts, nbr_sums
    # fallback: coordinate ranges too wide for scalar keys
    index = tables.index
    cells = tables.cells.tolist()
    for i, cell in enumerate(cells):
        total = 0
        acc = np.zeros(d)
        for v in itertools.product((-1, 0, 1), repeat=d):
            row = index.get(tuple(c + o for c, o in zip(cell, v)))
            if row is not None:
                total += int(tables.counts[row])
                acc += tables.sums[row]
        nbr_counts[i] = total
        nbr_sums[i] = acc
    return nbr_counts, nbr_sums
