"""Runtime-scaling benchmarks and bandwidth sweeps.

Timing wraps the engine call only (monotonic clock); parsing, generation
and scoring stay outside the timed region.  Runs are strictly sequential:
two timed runs never overlap, so wall times are honest.  An engine that
blows past the wall cap at some n is recorded as censored and skipped for
every larger n (it only gets slower), and censored rows are excluded from
the slope fit.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .data import GaussianMixtureSpec, generate_mixture
from .grid import PointSet
from .metrics import adjusted_mutual_information, adjusted_rand_index
from .modeseek import ENGINES, Labeling, ShiftConfig, ShiftTrace


@dataclass
class BenchRecord:
    engine: str
    n: int
    d: int
    h: float
    iters: int
    wall_time: float
    ari: float | None = None
    ami: float | None = None
    censored: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.n < 1 or self.d < 1 or self.wall_time <= 0:
            raise ValueError("n, d must be >= 1 and wall_time positive")


def time_engine_run(engine: str, points: PointSet,
                    cfg: ShiftConfig) -> tuple[Labeling, ShiftTrace, float]:
    """One full clustering run with the engine call timed and nothing else."""
    fn = ENGINES[engine]
    start = time.perf_counter()
    labeling, trace = fn(points, cfg)
    elapsed = time.perf_counter() - start
    return labeling, trace, elapsed


def bench_scaling(engines, n_grid, spec: GaussianMixtureSpec, h: float,
                  repeats: int = 3, timeout: float | None = None,
                  score: bool = False):
    """Time engines across growing n; fit log-log slopes.

    Returns (records, slopes) where slopes maps engine name to the fitted
    exponent of wall time against n (uncensored rows only; None if fewer
    than two usable rows remain).  The same generated dataset is shared by
    all engines at each n, and the median of `repeats` runs is kept.
    """
    engines = list(engines)
    for e in engines:
        if e not in ENGINES:
            raise ValueError(f"unknown engine {e!r}")
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 4:
        raise ValueError("need at least 4 sizes for a scaling fit")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n grid must be strictly increasing")
    if repeats < 3:
        raise ValueError("need at least 3 repeats (median taken)")
    cfg = ShiftConfig(h=h)
    records = []
    dead = set()  # engines that already timed out at a smaller n
    for n in n_grid:
        points, truth = generate_mixture(spec, n)
        for engine in engines:
            if engine in dead:
                continue
            runs = []
            for _ in range(repeats):
                labeling, trace, elapsed = time_engine_run(engine, points, cfg)
                runs.append((elapsed, labeling, trace))
            runs.sort(key=lambda r: r[0])
            elapsed, labeling, trace = runs[len(runs) // 2]
            censored = timeout is not None and elapsed > timeout
            rec = BenchRecord(
                engine=engine, n=n, d=spec.d, h=h, iters=trace.iterations,
                wall_time=elapsed, censored=censored,
                ari=adjusted_rand_index(labeling.labels, truth) if score else None,
                ami=adjusted_mutual_information(labeling.labels, truth)
                if score else None)
            records.append(rec)
            if censored:
                dead.add(engine)
                warnings.warn(
                    f"{engine} exceeded {timeout:.3g}s at n={n}; larger sizes "
                    f"skipped and this row excluded from the fit",
                    stacklevel=2)
    slopes = {}
    for engine in engines:
        rows = [r for r in records if r.engine == engine and not r.censored]
        if len(rows) < 2:
            slopes[engine] = None
            continue
        xs = np.log([r.n for r in rows])
        ys = np.log([r.wall_time for r in rows])
        slopes[engine] = float(np.polyfit(xs, ys, 1)[0])
    return records, slopes


@dataclass
class SweepRow:
    h: float
    ari: float
    ami: float
    k: int
    iters: int
    wall_time: float
    best: bool = False


def sweep_bandwidth(points: PointSet, labels, engine: str, h_grid,
                    eta: float | None = None,
                    max_iters: int = 300) -> list[SweepRow]:
    """Score one engine across a bandwidth grid against reference labels.

    Exactly one row (the first ARI maximum) is flagged best.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    h_grid = [float(h) for h in h_grid]
    if not h_grid:
        raise ValueError("bandwidth grid is empty")
    labels = np.asarray(labels)
    if labels.shape != (points.n,):
        raise ValueError(
            f"labels must have shape ({points.n},), got {labels.shape}")
    rows = []
    for h in h_grid:
        cfg = ShiftConfig(h=h, eta=eta, max_iters=max_iters)
        labeling, trace, elapsed = time_engine_run(engine, points, cfg)
        rows.append(SweepRow(
            h=h,
            ari=adjusted_rand_index(labeling.labels, labels),
            ami=adjusted_mutual_information(labeling.labels, labels),
            k=labeling.k,
            iters=trace.iterations,
            wall_time=elapsed))
    best = max(range(len(rows)), key=lambda i: rows[i].ari)
    rows[best].best = True
    return rows
