"""Dataset plumbing: synthetic Gaussian mixtures and CSV point files.

CSV layout is plain RFC-4180 with '.' decimals: one row per point, feature
columns first, optionally a trailing label column (any string).  A header
row is skipped automatically when its cells do not parse as numbers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .grid import PointSet


@dataclass
class GaussianMixtureSpec:
    """Isotropic Gaussian mixture with fixed component centers."""

    k: int
    d: int
    centers: np.ndarray          # (k, d)
    sigma: float
    weights: np.ndarray = field(default=None)  # simplex over components
    seed: int = 0

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.float64)
        if self.centers.shape != (self.k, self.d):
            raise ValueError(
                f"centers must be ({self.k}, {self.d}), got {self.centers.shape}")
        if self.sigma < 0 or not np.isfinite(self.sigma):
            raise ValueError(f"sigma must be a nonnegative real, got {self.sigma}")
        if self.weights is None:
            self.weights = np.full(self.k, 1.0 / self.k)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.k,) or np.any(self.weights < 0) \
                or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be a nonnegative vector summing to 1")


def default_mixture(k: int = 3, d: int = 2, sigma: float = 0.1,
                    seed: int = 0) -> GaussianMixtureSpec:
    """Well-separated components on a seeded random layout in [0, 10]^d."""
    rng = np.random.default_rng(seed)
    # rejection-place centers pairwise at least 10 sigma apart
    centers = [rng.uniform(0, 10, size=d)]
    while len(centers) < k:
        c = rng.uniform(0, 10, size=d)
        if all(np.linalg.norm(c - p) >= 10 * sigma for p in centers):
            centers.append(c)
    return GaussianMixtureSpec(k=k, d=d, centers=np.asarray(centers),
                               sigma=sigma, seed=seed)


def generate_mixture(spec: GaussianMixtureSpec, n: int) -> tuple[PointSet, np.ndarray]:
    """Draw n points; returns ground-truth component labels alongside."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(spec.seed)
    comp = rng.choice(spec.k, size=n, p=spec.weights)
    data = spec.centers[comp] + rng.normal(0.0, spec.sigma, size=(n, spec.d)) \
        if spec.sigma > 0 else spec.centers[comp].copy()
    return PointSet(data), comp.astype(np.int64)


def load_points_csv(path, label_column: bool = False):
    """Read points (and optionally a trailing label column) from CSV.

    Returns (PointSet, labels) where labels is None unless label_column
    is set.  Malformed input fails with the offending row and column.
    """
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    n_features = width - 1 if label_column else width
    if n_features < 1:
        raise ValueError(f"{path}: rows too short for any feature column")

    def parse_feature_row(idx, row):
        out = []
        for j in range(n_features):
            try:
                out.append(float(row[j]))
            except ValueError:
                raise ValueError(
                    f"{path}: row {idx + 1}, column {j + 1}: "
                    f"could not parse {row[j]!r} as a number") from None
        return out

    start = 0
    try:
        parse_feature_row(0, rows[0])
    except ValueError:
        start = 1  # header row
        if len(rows) == 1:
            raise ValueError(f"{path}: header only, no data rows") from None
    feats, labels = [], []
    for idx in range(start, len(rows)):
        row = rows[idx]
        if len(row) != width:
            raise ValueError(
                f"{path}: row {idx + 1} has {len(row)} cells, expected {width}")
        feats.append(parse_feature_row(idx, row))
        if label_column:
            labels.append(row[-1])
    points = PointSet(np.asarray(feats, dtype=np.float64))
    return points, (np.asarray(labels) if label_column else None)


def save_points_csv(path, points: PointSet, labels=None) -> None:
    """Write points one row per line, optional trailing label column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if labels is None:
            for row in points.data:
                writer.writerow([repr(float(v)) for v in row])
        else:
            labels = np.asarray(labels)
            if labels.shape != (points.n,):
                raise ValueError(
                    f"labels must have shape ({points.n},), got {labels.shape}")
            for row, lab in zip(points.data, labels):
                writer.writerow([repr(float(v)) for v in row] + [lab])
