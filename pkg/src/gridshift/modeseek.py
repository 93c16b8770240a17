"""Mode-seeking engines.

Two iterative engines share one outer loop shape: start every iterate at
the data, repeatedly replace each point by a local mean computed from the
*previous* iterate, stop once the summed Euclidean movement drops below a
tolerance.  They differ only in how the local mean is formed:

  * ``meanshiftpp``: hash the current iterate into axis-aligned grid cells
    of side h, keep per-cell counts and coordinate sums, and move each
    point to the mean over its cell plus the 3^d - 1 surrounding cells.
    Linear in n per iteration.
  * ``meanshift_baseline``: the classical kernel-weighted mean over all
    points, flat kernel (closed Euclidean ball of radius h) by default,
    Gaussian optional.  Quadratic in n per iteration; kept as the slow
    reference the fast engine is judged against.

Converged iterates are turned into a flat labeling by ``extract_clusters``:
bin the final positions at the same bandwidth and union-find any occupied
cells that touch (Chebyshev adjacency).  Points heading to one mode end up
within O(h) of each other, so reusing h introduces no extra knob.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import (
    PointSet,
    _cell_keys,
    _check_bandwidth,
    _group_cells,
    _neighbor_stats_cells,
    _offsets,
    _tables_from_data,
    bin_points,
)

_KERNELS = ("flat", "gaussian")

DEFAULT_MAX_ITERS = 300
# auto tolerance: eta = ETA_SCALE * n * h, so the mean per-point movement
# must fall below a fixed fraction of the bandwidth
ETA_SCALE = 1e-4


@dataclass
class ShiftConfig:
    """Knobs shared by both engines.

    eta=None resolves to ETA_SCALE * n * h at run time; kernel only
    matters for the baseline.
    """

    h: float
    eta: float | None = None
    max_iters: int = DEFAULT_MAX_ITERS
    kernel: str = "flat"

    def __post_init__(self):
        _check_bandwidth(self.h)
        if self.eta is not None:
            if not np.isfinite(self.eta) or self.eta <= 0:
                raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if self.kernel not in _KERNELS:
            raise ValueError(f"kernel must be one of {_KERNELS}, got {self.kernel!r}")

    def resolve_eta(self, n: int) -> float:
        if self.eta is not None:
            return float(self.eta)
        return ETA_SCALE * n * self.h


@dataclass
class Labeling:
    """Flat cluster assignment plus one representative position per cluster."""

    labels: np.ndarray  # (n,) int64, values dense in [0, k)
    k: int
    modes: np.ndarray   # (k, d) float64

    def __post_init__(self):
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        self.modes = np.ascontiguousarray(self.modes, dtype=np.float64)
        if self.k < 1 or self.modes.shape[0] != self.k:
            raise ValueError(f"expected {self.k} mode rows, got {self.modes.shape}")
        if self.labels.min() != 0 or self.labels.max() != self.k - 1:
            raise ValueError("labels must cover [0, k) densely")


@dataclass
class ShiftTrace:
    """Observability record of the shift loop."""

    iterations: int
    total_movement_per_iter: np.ndarray = field(repr=False)
    converged: bool = False


# ------------------------------------------------------------- fast engine

def _shift_once(y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """One grid-mean update of the whole iterate; returns summed movement."""
    tables, inverse = _tables_from_data(y, h)
    counts, sums = _neighbor_stats_cells(tables)
    y_next = sums[inverse] / counts[inverse, None]
    movement = float(np.sqrt(((y_next - y) ** 2).sum(axis=1)).sum())
    return y_next, movement


def meanshiftpp_step(points: PointSet, cfg: ShiftConfig) -> tuple[PointSet, float]:
    """A single grid-neighborhood mean update.

    Every point lands on the mean of all points (of the incoming iterate)
    whose grid cell is within Chebyshev distance 1 of its own.  The
    denominator cannot vanish: a point always counts itself.
    """
    y_next, movement = _shift_once(points.data, cfg.h)
    return PointSet(y_next), movement


def meanshiftpp(points: PointSet, cfg: ShiftConfig) -> tuple[Labeling, ShiftTrace]:
    """Grid-based mode seeking over the full dataset.

    Rebuilds the cell tables from the shifted iterate every round and
    stops once the summed per-point movement drops below eta (or at
    max_iters, which is reported, not raised).
    """
    y = points.data
    eta = cfg.resolve_eta(points.n)
    history = []
    converged = False
    for _ in range(cfg.max_iters):
        y, movement = _shift_once(y, cfg.h)
        history.append(movement)
        if movement < eta:
            converged = True
            break
    labeling = _extract(y, cfg.h)
    trace = ShiftTrace(iterations=len(history),
                       total_movement_per_iter=np.asarray(history),
                       converged=converged)
    return labeling, trace


# --------------------------------------------------------- baseline engine

def _kernel_shift_once(y, weights, h, kernel, chunk_rows):
    """One weighted kernel-mean update over deduplicated rows."""
    k = y.shape[0]
    sq = (y * y).sum(axis=1)
    y_next = np.empty_like(y)
    h2 = h * h
    for lo in range(0, k, chunk_rows):
        hi = min(lo + chunk_rows, k)
        # squared distances via the expanded product, clipped against
        # tiny negative rounding
        d2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (y[lo:hi] @ y.T)
        np.maximum(d2, 0.0, out=d2)
        if kernel == "flat":
            w = (d2 <= h2) * weights[None, :]
        else:
            w = np.exp(d2 / (-2.0 * h2)) * weights[None, :]
        y_next[lo:hi] = (w @ y) / w.sum(axis=1)[:, None]
    movement = float((weights * np.sqrt(((y_next - y) ** 2).sum(axis=1))).sum())
    return y_next, movement


def meanshift_baseline(points: PointSet, cfg: ShiftConfig) -> tuple[Labeling, ShiftTrace]:
    """Classical kernel mode seeking, quadratic per iteration.

    Points move to the kernel-weighted mean of the previous iterate, so
    coincident rows stay coincident forever; the iterate is collapsed to
    unique rows with multiplicity weights, which changes nothing about
    the result and spares O(duplicates^2) work.
    """
    uniq, inverse, mult = np.unique(points.data, axis=0,
                                    return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    y = uniq
    weights = mult.astype(np.float64)
    eta = cfg.resolve_eta(points.n)
    chunk_rows = max(1, int(4e6) // max(1, y.shape[0]))
    history = []
    converged = False
    for _ in range(cfg.max_iters):
        y, movement = _kernel_shift_once(y, weights, cfg.h, cfg.kernel, chunk_rows)
        history.append(movement)
        if movement < eta:
            converged = True
            break
    labeling = _extract(y[inverse], cfg.h)
    trace = ShiftTrace(iterations=len(history),
                       total_movement_per_iter=np.asarray(history),
                       converged=converged)
    return labeling, trace


# --------------------------------------------------------- label extraction

class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:  # compress the walked path
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]


def _adjacency_components(cells: np.ndarray) -> np.ndarray:
    """Component id per unique cell, merging Chebyshev-adjacent cells."""
    k, d = cells.shape
    uf = UnionFind(k)
    encoded = _cell_keys(cells)
    offsets = _offsets(d)
    nonzero = [v for v in offsets if any(v)]
    if encoded is not None:
        keys, strides = encoded
        # cells arrive lexicographically sorted, so keys are ascending
        for v in nonzero:
            delta = int(np.asarray(v, dtype=np.int64) @ strides)
            pos = np.searchsorted(keys, keys + delta)
            pos_c = np.minimum(pos, k - 1)
            hit = np.nonzero(keys[pos_c] == keys + delta)[0]
            for i in hit.tolist():
                uf.union(i, int(pos_c[i]))
    else:
        where = {tuple(c): i for i, c in enumerate(cells.tolist())}
        for i, c in enumerate(cells.tolist()):
            for v in nonzero:
                j = where.get(tuple(a + b for a, b in zip(c, v)))
                if j is not None:
                    uf.union(i, j)
    return np.asarray([uf.find(i) for i in range(k)], dtype=np.int64)


def _extract(y: np.ndarray, h: float) -> Labeling:
    cells = bin_points(y, h)
    uniq_cells, inverse, _, _, _ = _group_cells(cells)
    roots = _adjacency_components(uniq_cells)
    comp = roots[inverse]  # per-point component id (a unique-cell row index)
    # relabel components to dense ids ordered by first appearance in the data
    uniq_comp, first_idx = np.unique(comp, return_index=True)
    rank = np.empty(len(uniq_comp), dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(len(uniq_comp))
    labels = rank[np.searchsorted(uniq_comp, comp)]
    k = len(uniq_comp)
    d = y.shape[1]
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    modes = np.empty((k, d))
    for j in range(d):
        modes[:, j] = np.bincount(labels, weights=y[:, j], minlength=k) / counts
    return Labeling(labels=labels, k=k, modes=modes)


def extract_clusters(converged: PointSet, h: float) -> Labeling:
    """Group converged positions into clusters.

    Positions are binned at edge length h; occupied cells touching along
    any axis or diagonal (Chebyshev adjacency) join one cluster via
    union-find.  The reported mode of a cluster is the mean of its
    converged positions.  Labels are dense in [0, k), numbered by first
    appearance in the input order.
    """
    _check_bandwidth(h)
    return _extract(converged.data, h)


ENGINES = {"meanshiftpp": meanshiftpp, "meanshift": meanshift_baseline}
