"""Histogram density estimator and rate harness tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridshift.density import (
    RateReport,
    Triangular,
    TruncatedGaussian,
    UniformBox,
    evaluate,
    evaluate_many,
    fit_density,
    make_target,
    rate_experiment,
)
from gridshift.grid import PointSet


def recount_oracle(data, x, h, n):
    """Linear-scan density: count bin-mates of x directly."""
    gx = np.floor(np.asarray(x) / h)
    hits = np.all(np.floor(data / h) == gx, axis=1).sum()
    return hits / (n * h ** data.shape[1])


def test_all_points_in_one_unit_cell():
    data = np.linspace(0.05, 0.95, 10).reshape(-1, 1)
    est = fit_density(PointSet(data), 1.0)
    assert evaluate(est, [0.5]) == pytest.approx(1.0)


def test_two_cells_three_one_split():
    data = np.array([[0.1], [0.2], [0.3], [0.6]])
    est = fit_density(PointSet(data), 0.5)
    assert evaluate(est, [0.25]) == pytest.approx(3 / (4 * 0.5))
    assert evaluate(est, [0.75]) == pytest.approx(1 / (4 * 0.5))


def test_unoccupied_cell_scores_zero():
    est = fit_density(PointSet(np.array([[0.1], [0.4]])), 0.5)
    assert evaluate(est, [7.3]) == 0.0


def test_stored_point_location_has_mass():
    rng = np.random.default_rng(2)
    data = rng.uniform(0, 1, size=(30, 2))
    est = fit_density(PointSet(data), 0.2)
    floor = 1.0 / (30 * 0.2 ** 2)
    for row in data[:5]:
        assert evaluate(est, row) >= floor - 1e-12


def test_evaluate_rejects_dimension_mismatch():
    est = fit_density(PointSet(np.zeros((3, 2))), 1.0)
    with pytest.raises(ValueError):
        evaluate(est, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        evaluate_many(est, np.zeros((4, 3)))


def test_evaluate_matches_recount_oracle():
    rng = np.random.default_rng(8)
    data = rng.normal(0, 1, size=(200, 2))
    est = fit_density(PointSet(data), 0.3)
    queries = np.vstack([rng.normal(0, 1, size=(40, 2)), data[:10]])
    got = evaluate_many(est, queries)
    for i, q in enumerate(queries):
        assert got[i] == pytest.approx(
            recount_oracle(data, q, 0.3, 200), rel=1e-12)


def test_normalization_exact_in_counts_and_float():
    rng = np.random.default_rng(12)
    data = rng.uniform(-2, 5, size=(500, 3))
    est = fit_density(PointSet(data), 0.7)
    assert int(est.tables.counts.sum()) == 500
    # occupied-cell centers, one per cell
    centers = (est.tables.cells + 0.5) * est.h
    total = evaluate_many(est, centers).sum() * est.cell_volume
    assert total == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30)
@given(st.integers(0, 2**31 - 1), st.sampled_from([0.25, 0.5, 1.5]))
def test_property_nonnegative_everywhere(seed, h):
    rng = np.random.default_rng(seed)
    data = rng.normal(0, 2, size=(60, 2))
    est = fit_density(PointSet(data), h)
    queries = rng.uniform(-8, 8, size=(50, 2))
    assert np.all(evaluate_many(est, queries) >= 0.0)


def test_uniform_square_interior_cells_near_one():
    rng = np.random.default_rng(77)
    n = 100_000
    data = rng.uniform(0, 1, size=(n, 2))
    est = fit_density(PointSet(data), 0.1)
    xs = np.arange(0.15, 0.86, 0.1)  # centers of the 64 interior cells
    qx, qy = np.meshgrid(xs, xs)
    vals = evaluate_many(est, np.column_stack([qx.ravel(), qy.ravel()]))
    assert np.all(np.abs(vals - 1.0) < 0.15)


def test_degenerate_single_cell_bandwidth():
    rng = np.random.default_rng(5)
    data = rng.uniform(0.1, 0.9, size=(50, 1))
    est = fit_density(PointSet(data), 10.0)
    assert est.tables.cells.shape[0] == 1
    assert evaluate(est, data[0]) == pytest.approx(1.0 / 10.0)


# ------------------------------------------------------------ rate harness

def test_rate_requires_three_increasing_sizes():
    t = UniformBox(d=1)
    with pytest.raises(ValueError):
        rate_experiment(t, [100, 200], alpha=1.0, seed=0)
    with pytest.raises(ValueError):
        rate_experiment(t, [100, 100, 200], alpha=1.0, seed=0)
    with pytest.raises(ValueError):
        rate_experiment(t, [100, 200, 400], alpha=1.5, seed=0)


def test_rate_uniform_errors_shrink():
    report = rate_experiment(UniformBox(d=1), [1000, 10_000, 100_000],
                             alpha=1.0, seed=42)
    err = report.sup_errors
    assert np.all(err[1:] < err[:-1])
    assert report.fitted_exponent < 0


def test_rate_triangular_exponent_sane():
    # theory for alpha=1, d=1 says n^(-1/3); loose band, two seeds
    for seed in (0, 1):
        report = rate_experiment(Triangular(d=1), [2000, 8000, 32_000],
                                 alpha=1.0, seed=seed)
        assert -0.55 <= report.fitted_exponent <= -0.12, report.fitted_exponent


def test_rate_report_is_deterministic():
    t = TruncatedGaussian(d=1)
    a = rate_experiment(t, [500, 1000, 2000], alpha=1.0, seed=9)
    b = rate_experiment(t, [500, 1000, 2000], alpha=1.0, seed=9)
    assert np.array_equal(a.sup_errors, b.sup_errors)
    assert a.fitted_exponent == b.fitted_exponent
    assert np.array_equal(a.bandwidths, b.bandwidths)


def test_rate_bandwidth_schedule():
    report = rate_experiment(UniformBox(d=2), [1000, 3000, 9000],
                             alpha=0.5, seed=3)
    want = np.array([n ** (-1.0 / 3.0) for n in (1000, 3000, 9000)])
    assert report.bandwidths == pytest.approx(want)


def test_refining_a_too_coarse_bandwidth_helps():
    target = Triangular(d=1)
    wins = 0
    for seed in range(5):
        rng = np.random.default_rng([seed, 100])
        data = PointSet(target.sample(rng, 20_000))
        lattice = np.arange(0.15, 0.851, 0.01).reshape(-1, 1)
        errs = []
        for h in (0.4, 0.2):
            est = fit_density(data, h)
            errs.append(np.abs(evaluate_many(est, lattice)
                               - target.pdf(lattice)).max())
        wins += errs[1] < errs[0]
    assert wins >= 3


# ---------------------------------------------------------------- targets

def test_target_pdfs_integrate_to_one():
    # Riemann check on a fine grid
    xs = np.linspace(0.0005, 0.9995, 1000).reshape(-1, 1)
    for target in (UniformBox(d=1), Triangular(d=1), TruncatedGaussian(d=1)):
        mass = target.pdf(xs).sum() / 1000
        assert mass == pytest.approx(1.0, abs=2e-3), target.name


def test_target_samples_respect_support():
    rng = np.random.default_rng(4)
    for target in (UniformBox(d=2), Triangular(d=2), TruncatedGaussian(d=2)):
        x = target.sample(rng, 500)
        assert x.shape == (500, 2)
        assert np.all(x >= target.lo) and np.all(x <= target.hi)


def test_make_target_registry():
    assert make_target("uniform", d=2).d == 2
    assert make_target("triangular").name == "triangular"
    assert make_target("gaussian").name == "gaussian"
    with pytest.raises(ValueError):
        make_target("cauchy")


def test_report_validation():
    with pytest.raises(ValueError):
        RateReport(sample_sizes=np.array([1, 2]), sup_errors=np.array([0.1]),
                   fitted_exponent=-0.3, bandwidths=np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        RateReport(sample_sizes=np.array([1, 2]),
                   sup_errors=np.array([0.1, -0.2]),
                   fitted_exponent=-0.3, bandwidths=np.array([0.1, 0.2]))
