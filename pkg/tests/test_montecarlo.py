import math

import numpy as np
import pytest
from scipy.stats import binomtest

from bernoulli_stein.counts import mean_count, variance_exact
from bernoulli_stein.graphs import path_graph, triangle
from bernoulli_stein.montecarlo import (
    NonNormalRegime,
    SampleConfig,
    dkw_radius,
    empirical_dK,
    loglog_slope,
    read_csv,
    replication_rng,
    scaling_study,
    simulate_counts,
    standardize_counts,
    write_plot_script,
    write_scaling_csv,
    write_simulation_csv,
)


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(1, 0.5)
    with pytest.raises(ValueError):
        SampleConfig(10, 1.5)
    with pytest.raises(ValueError):
        SampleConfig(10, 0.5, reps=0)


def test_replication_streams_are_reproducible_and_distinct():
    a = replication_rng(3, 7).random(4)
    assert np.array_equal(a, replication_rng(3, 7).random(4))
    assert not np.array_equal(a, replication_rng(3, 8).random(4))
    assert not np.array_equal(a, replication_rng(4, 7).random(4))


def test_results_do_not_depend_on_threads():
    cfg = SampleConfig(20, 0.3, reps=300, seed=9)
    assert np.array_equal(simulate_counts(triangle(), cfg, 1), simulate_counts(triangle(), cfg, 3))


def test_zero_variance_is_rejected():
    with pytest.raises(ValueError):
        standardize_counts(np.full(200, 5), triangle(), 10, 0.5, mode="sample-moments")
    with pytest.raises(ValueError):
        standardize_counts(np.arange(5), triangle(), 10, 0.5, mode="bogus")


def test_triangle_mean_and_moment_modes():
    n, p, reps = 30, 0.5, 10_000
    counts = simulate_counts(triangle(), SampleConfig(n, p, reps, seed=1))
    mu = math.comb(n, 3) * p**3
    var = variance_exact(triangle(), n, p)
    assert mean_count(triangle(), n, p) == pytest.approx(mu)
    se_mean = math.sqrt(var / reps)
    assert abs(counts.mean() - mu) < 3 * se_mean
    centered = counts - counts.mean()
    se_var = math.sqrt((np.mean(centered**4) - np.var(centered) ** 2) / reps)
    assert abs(counts.var(ddof=1) - var) < 3 * se_var
    exact = standardize_counts(counts, triangle(), n, p, "exact-moments")
    sample = standardize_counts(counts, triangle(), n, p, "sample-moments")
    assert abs(exact.mean()) < 3 / math.sqrt(reps)
    assert abs(sample.mean()) < 1e-12


def test_empirical_distance_basics():
    assert empirical_dK(np.zeros(200)).dk_hat == pytest.approx(0.5)
    with pytest.raises(ValueError):
        empirical_dK(np.zeros(99))
    assert dkw_radius(20_000) == pytest.approx(0.0096, abs=5e-5)


def test_null_calibration():
    x = np.random.default_rng(0).standard_normal(100_000)
    assert empirical_dK(x).dk_hat < 0.01


def test_dkw_coverage():
    # DKW gives P(dk_hat > radius) <= 5%, and the bound is tight for large samples,
    # so test the exceedance count for consistency with a rate of at most 5%
    rng = np.random.default_rng(2024)
    reps, trials = 20_000, 200
    radius = dkw_radius(reps)
    hits = sum(empirical_dK(rng.standard_normal(reps)).dk_hat > radius for _ in range(trials))
    assert binomtest(hits, trials, 0.05, alternative="greater").pvalue > 0.001


@pytest.mark.slow
def test_sparse_triangle_simulation():
    cfg = SampleConfig(64, 0.1, reps=20_000, seed=7)
    z = standardize_counts(simulate_counts(triangle(), cfg), triangle(), 64, 0.1)
    ed = empirical_dK(z)
    assert ed.dkw_radius < ed.dk_hat < 0.1


def test_loglog_slope_of_power_law():
    x = np.array([10.0, 20, 40, 80])
    assert loglog_slope(x, 3 * x**-0.7) == pytest.approx(-0.7)


def test_scaling_preconditions():
    with pytest.raises(NonNormalRegime):
        scaling_study(triangle(), 1.1, [16, 32, 64, 128], reps=100)
    with pytest.raises(ValueError):
        scaling_study(triangle(), 0.5, [16, 32, 64], reps=100)
    with pytest.raises(ValueError):
        scaling_study(triangle(), 0.5, [16, 32, 32, 64], reps=100)


def test_small_scaling_study_and_csv(tmp_path):
    study = scaling_study(path_graph(2), 0.5, [8, 12, 16, 24], reps=200, seed=3)
    assert study.predicted_slope == pytest.approx(-0.5 * min(2 - 0.5, 3 - 1.0))
    assert [pt.n for pt in study.points] == [8, 12, 16, 24]
    path = tmp_path / "scaling.csv"
    write_scaling_csv(path, study)
    rows = read_csv(path)
    assert list(rows[0]) == ["n", "p", "reps", "dk_hat", "dkw_radius", "bound_parts_log", "predicted_slope"]
    assert rows[-1]["n"] == "slope"
    assert float(rows[-1]["dk_hat"]) == study.fitted_slope
    for row, pt in zip(rows, study.points):
        assert float(row["dk_hat"]) == pt.dk_hat
        assert float(row["p"]) == pt.p
    again = tmp_path / "again.csv"
    write_scaling_csv(again, scaling_study(path_graph(2), 0.5, [8, 12, 16, 24], reps=200, seed=3))
    assert path.read_bytes() == again.read_bytes()


def test_simulation_csv_round_trip(tmp_path):
    cfg = SampleConfig(15, 0.4, reps=150, seed=5)
    counts = simulate_counts(triangle(), cfg)
    z = standardize_counts(counts, triangle(), 15, 0.4)
    path = tmp_path / "sim.csv"
    write_simulation_csv(path, counts, z)
    rows = read_csv(path)
    assert list(rows[0]) == ["rep", "count", "standardized"]
    assert np.array_equal([float(r["standardized"]) for r in rows], z)
    assert np.array_equal([int(r["count"]) for r in rows], counts)
    write_plot_script(tmp_path / "sim.plot", path, "rep", ["standardized"])
    assert (tmp_path / "sim.plot").read_text().splitlines()[0] == "data sim.csv"
