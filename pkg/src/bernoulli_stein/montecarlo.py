"""Monte Carlo estimates of the Kolmogorov distance of standardized counts.

Replication ``r`` of a run seeded with ``seed`` draws from its own Philox
stream keyed by ``(seed, r)``, so results do not depend on how replications
are scheduled across threads.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .counting import count_copies, sample_gnp
from .counts import mean_count, variance_exact
from .distance import kolmogorov_from_atoms
from .graphs import (
    GraphSpec,
    PowerRule,
    asymptotic_normality_check,
    kolmogorov_bound_graph,
    predicted_slope,
    subgraph_profile,
)

MIN_REPS = 100
DEFAULT_REPS = 20_000


class NonNormalRegime(ValueError):
    """The requested p-rule lies outside the asymptotically normal range."""


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep,))))


@dataclass(frozen=True)
class SampleConfig:
    n: int
    p: float
    reps: int = DEFAULT_REPS
    seed: int = 0
    counter: str = "auto"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.reps < 1:
            raise ValueError("reps must be positive")


def simulate_counts(G: GraphSpec, config: SampleConfig, threads: int = 1) -> np.ndarray:
    """Copy counts of ``G`` in ``config.reps`` independent draws of ``G(n, p)``."""
    out = np.empty(config.reps, dtype=np.int64)

    def work(lo, hi):
        for r in range(lo, hi):
            adj = sample_gnp(config.n, config.p, replication_rng(config.seed, r))
            out[r] = count_copies(adj, G, config.counter)

    threads = max(1, int(threads))
    if threads == 1:
        work(0, config.reps)
    else:
        bounds = np.linspace(0, config.reps, threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, bounds[:-1], bounds[1:]))
    return out


def standardize_counts(samples, G: GraphSpec, n: int, p: float, mode: str = "exact-moments"):
    """Return ``(samples - mean) / sd`` with exact or sample moments."""
    x = np.asarray(samples, dtype=np.float64)
    if mode == "exact-moments":
        mu = mean_count(G, n, p)
        var = variance_exact(G, n, p)
    elif mode == "sample-moments":
        mu = x.mean()
        var = x.var(ddof=1) if x.size > 1 else 0.0
    else:
        raise ValueError(f"unknown moments mode {mode!r}")
    if not var > 0.0:
        raise ValueError("zero variance: cannot standardize")
    return (x - mu) / math.sqrt(var)


def dkw_radius(reps: int, delta: float = 0.05) -> float:
    """Dvoretzky-Kiefer-Wolfowitz radius ``sqrt(ln(2/delta) / (2 reps))``."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * reps))


@dataclass(frozen=True)
class EmpiricalDistance:
    samples: np.ndarray = field(repr=False)
    dk_hat: float
    dkw_radius: float


def empirical_dK(standardized, delta: float = 0.05) -> EmpiricalDistance:
    x = np.asarray(standardized, dtype=np.float64)
    if x.size < MIN_REPS:
        raise ValueError(f"need at least {MIN_REPS} samples, got {x.size}")
    d = kolmogorov_from_atoms(x, np.ones_like(x))
    return EmpiricalDistance(x, d, dkw_radius(x.size, delta))


@dataclass(frozen=True)
class ScalingPoint:
    n: int
    p: float
    reps: int
    dk_hat: float
    dkw_radius: float
    log_bound: float
    moments: str


@dataclass(frozen=True)
class ScalingStudy:
    alpha: float
    c: float
    points: List[ScalingPoint]
    fitted_slope: float
    predicted_slope: float
    bound_slope: float

    @property
    def n_values(self):
        return [pt.n for pt in self.points]


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def scaling_study(
    G: GraphSpec,
    alpha: float,
    n_list: Sequence[int],
    c: float = 1.0,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    counter: str = "auto",
    moments: str = "exact-moments",
    threads: int = 1,
) -> ScalingStudy:
    """Estimate ``d_K`` along ``p = c n^{-alpha}`` and fit its decay exponent.

    Point ``i`` of the grid uses seed ``seed + i``.
    """
    n_list = list(n_list)
    if len(n_list) < 4:
        raise ValueError("a scaling fit needs at least 4 grid points")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    profile = subgraph_profile(G)
    rule = PowerRule(alpha, c)
    verdict = asymptotic_normality_check(G, n_list, rule, profile)
    if not verdict.normal:
        raise NonNormalRegime(verdict.reason)

    points = []
    for i, n in enumerate(n_list):
        p = rule(n)
        cfg = SampleConfig(n, p, reps, seed + i, counter)
        counts = simulate_counts(G, cfg, threads)
        z = standardize_counts(counts, G, n, p, moments)
        ed = empirical_dK(z)
        report = kolmogorov_bound_graph(G, n, p, profile)
        points.append(ScalingPoint(n, p, reps, ed.dk_hat, ed.dkw_radius, report.log_bound, moments))
    ns = [pt.n for pt in points]
    return ScalingStudy(
        alpha=alpha,
        c=c,
        points=points,
        fitted_slope=loglog_slope(ns, [pt.dk_hat for pt in points]),
        predicted_slope=predicted_slope(G, alpha, profile),
        bound_slope=loglog_slope(ns, [math.exp(pt.log_bound) for pt in points]),
    )


# -- CSV ---------------------------------------------------------------------


def _f(x) -> str:
    return format(float(x), ".17g")


SIMULATE_HEADER = ["rep", "count", "standardized"]
SCALING_HEADER = ["n", "p", "reps", "dk_hat", "dkw_radius", "bound_parts_log", "predicted_slope"]


def write_simulation_csv(path, counts, standardized):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIMULATE_HEADER)
        for r, (k, z) in enumerate(zip(counts, standardized)):
            w.writerow([r, int(k), _f(z)])


def write_scaling_csv(path, study: ScalingStudy):
    """One row per grid point, then a ``slope`` row holding the fitted slope in ``dk_hat``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCALING_HEADER)
        for pt in study.points:
            w.writerow(
                [pt.n, _f(pt.p), pt.reps, _f(pt.dk_hat), _f(pt.dkw_radius), _f(pt.log_bound),
                 _f(study.predicted_slope)]
            )
        w.writerow(["slope", "", "", _f(study.fitted_slope), "", _f(study.bound_slope),
                    _f(study.predicted_slope)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_plot_script(path, csv_path, x, ys, logscale=True):
    """Tool-agnostic plot description: one ``key value`` directive per line."""
    lines = [f"data {os.path.basename(csv_path)}", f"x {x}"]
    lines += [f"y {y}" for y in ys]
    if logscale:
        lines += ["xscale log", "yscale log"]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
