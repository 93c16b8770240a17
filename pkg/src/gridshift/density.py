"""Grid-cell density estimation and an empirical convergence-rate harness.

The estimator is the histogram on the bandwidth-h lattice:

    p_hat(x) = (# samples in the cell containing x) / (n * h^d)

It integrates to one by construction (cell volumes are h^d and counts sum
to n).  The rate harness draws growing samples from a known density, sets
h = n^(-1/(2*alpha + d)), measures the sup error over a fine lattice on the
support interior, and fits the log-log slope of error against n.  A margin
of h is trimmed off the support boundary before measuring: the estimator is
biased in boundary cells that straddle the support edge, and that bias says
nothing about the interior rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import truncnorm

from .grid import CellTables, PointSet, bin_point, bin_points, build_cell_tables

__all__ = [
    "DensityEstimate", "RateReport", "TargetDensity",
    "UniformBox", "Triangular", "TruncatedGaussian", "make_target",
    "fit_density", "evaluate", "evaluate_many", "rate_experiment",
]


@dataclass
class DensityEstimate:
    """Histogram density on the bandwidth-h grid."""

    tables: CellTables
    n: int
    h: float

    @property
    def d(self) -> int:
        return self.tables.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d


def fit_density(points: PointSet, h: float) -> DensityEstimate:
    tables = build_cell_tables(points, h)
    return DensityEstimate(tables=tables, n=points.n, h=h)


def evaluate(est: DensityEstimate, x) -> float:
    """Density value at a single query point; 0 in unoccupied cells."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (est.d,):
        raise ValueError(f"query must have shape ({est.d},), got {x.shape}")
    g = bin_point(x, est.h)
    return est.tables.count_of(g) / (est.n * est.cell_volume)


def evaluate_many(est: DensityEstimate, queries: np.ndarray) -> np.ndarray:
    """Vector of density values for an (m, d) batch of query points."""
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2 or queries.shape[1] != est.d:
        raise ValueError(
            f"queries must have shape (m, {est.d}), got {queries.shape}")
    cells = bin_points(queries, est.h)
    lookup = est.tables.index
    counts = est.tables.counts
    scale = 1.0 / (est.n * est.cell_volume)
    out = np.zeros(len(queries))
    for i, c in enumerate(map(tuple, cells.tolist())):
        row = lookup.get(c)
        if row is not None:
            out[i] = counts[row] * scale
    return out


# ----------------------------------------------------------- target spec

class TargetDensity:
    """A sampleable density with a closed-form pdf on a box support."""

    name: str
    d: int
    lo: np.ndarray
    hi: np.ndarray

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class UniformBox(TargetDensity):
    """Constant density on an axis-aligned box, default the unit cube."""

    def __init__(self, d: int = 1, lo=0.0, hi=1.0):
        self.name = "uniform"
        self.d = d
        self.lo = np.full(d, float(lo))
        self.hi = np.full(d, float(hi))
        self._value = 1.0 / float(np.prod(self.hi - self.lo))

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=(n, self.d))

    def pdf(self, x):
        x = np.atleast_2d(x)
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=1)
        return np.where(inside, self._value, 0.0)


class Triangular(TargetDensity):
    """Product of symmetric triangular densities on [0, 1] (peak at 1/2).

    Lipschitz but not differentiable at the peak: a natural alpha = 1
    target.  Marginal pdf is 4x on [0, 1/2] and 4(1-x) on [1/2, 1].
    """

    def __init__(self, d: int = 1):
        self.name = "triangular"
        self.d = d
        self.lo = np.zeros(d)
        self.hi = np.ones(d)

    def sample(self, rng, n):
        cols = [rng.triangular(0.0, 0.5, 1.0, size=n) for _ in range(self.d)]
        return np.column_stack(cols)

    def pdf(self, x):
        x = np.atleast_2d(x)
        marg = np.where(x <= 0.5, 4.0 * x, 4.0 * (1.0 - x))
        marg = np.where((x < 0.0) | (x > 1.0), 0.0, marg)
        return marg.prod(axis=1)


class TruncatedGaussian(TargetDensity):
    """Product of N(1/2, sigma^2) truncated to [0, 1] per axis."""

    def __init__(self, d: int = 1, sigma: float = 0.15):
        self.name = "gaussian"
        self.d = d
        self.sigma = sigma
        self.lo = np.zeros(d)
        self.hi = np.ones(d)
        self._dist = truncnorm((0.0 - 0.5) / sigma, (1.0 - 0.5) / sigma,
                               loc=0.5, scale=sigma)

    def sample(self, rng, n):
        cols = [self._dist.rvs(size=n, random_state=rng) for _ in range(self.d)]
        return np.column_stack(cols)

    def pdf(self, x):
        x = np.atleast_2d(x)
        return self._dist.pdf(x).prod(axis=1)


_TARGETS = {"uniform": UniformBox, "triangular": Triangular,
            "gaussian": TruncatedGaussian}


def make_target(name: str, d: int = 1) -> TargetDensity:
    if name not in _TARGETS:
        raise ValueError(f"unknown target {name!r}, choose from {sorted(_TARGETS)}")
    return _TARGETS[name](d=d)


# ------------------------------------------------------------ rate harness

@dataclass
class RateReport:
    """Sup-error trajectory of the estimator across sample sizes."""

    sample_sizes: np.ndarray
    sup_errors: np.ndarray
    fitted_exponent: float
    bandwidths: np.ndarray

    def __post_init__(self):
        if not (len(self.sample_sizes) == len(self.sup_errors)
                == len(self.bandwidths)):
            raise ValueError("report vectors must have equal length")
        if np.any(np.asarray(self.sup_errors) < 0):
            raise ValueError("sup errors cannot be negative")


def _interior_lattice(target: TargetDensity, h: float) -> np.ndarray:
    """Fine evaluation lattice (spacing h/4) inset h from the boundary."""
    axes = []
    for j in range(target.d):
        lo = target.lo[j] + h
        hi = target.hi[j] - h
        if hi <= lo:
            raise ValueError(
                f"margin h={h} leaves no interior on axis {j}")
        axes.append(np.arange(lo, hi + 1e-12, h / 4.0))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def rate_experiment(target: TargetDensity, sample_sizes, alpha: float,
                    seed: int) -> RateReport:
    """Measure how fast the sup error shrinks as n grows.

    For each n the bandwidth follows the smoothness-matched schedule
    h = n^(-1/(2*alpha + d)); each sample size gets its own substream of
    the seed so reports are reproducible and sizes independent.
    """
    sizes = [int(v) for v in sample_sizes]
    if len(sizes) < 3:
        raise ValueError("need at least 3 sample sizes to fit a slope")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sample sizes must be strictly increasing")
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    sup_errors = []
    bandwidths = []
    for idx, n in enumerate(sizes):
        rng = np.random.default_rng([seed, idx])
        h = n ** (-1.0 / (2.0 * alpha + target.d))
        est = fit_density(PointSet(target.sample(rng, n)), h)
        lattice = _interior_lattice(target, h)
        errors = np.abs(evaluate_many(est, lattice) - target.pdf(lattice))
        sup_errors.append(float(errors.max()))
        bandwidths.append(h)
    slope = np.polyfit(np.log(sizes), np.log(sup_errors), 1)[0]
    return RateReport(sample_sizes=np.asarray(sizes),
                      sup_errors=np.asarray(sup_errors),
                      fitted_exponent=float(slope),
                      bandwidths=np.asarray(bandwidths))
