"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to the terminal summary (see conftest.py),
so ``pytest tests/test_acceptance.py`` ends with one line per criterion.
Run directly with ``python tests/test_acceptance.py``.
"""
import math
import sys
import time

import numpy as np
import pytest

from bernoulli_stein import verify as V
from bernoulli_stein.counting import count_copies, sample_gnp
from bernoulli_stein.counts import variance_exact
from bernoulli_stein.graphs import (
    ComplementPowerRule,
    PowerRule,
    asymptotic_normality_check,
    complete_graph,
    cycle_graph,
    edge_graph,
    path_graph,
    star_graph,
    triangle,
    variance_asymptotic,
)
from bernoulli_stein.montecarlo import scaling_study

from conftest import ACCEPTANCE_LINES
from oracles import brute_force_copies

MS, PS = [6, 10, 12], [0.2, 0.5, 0.7]
TRIALS = 200
SEED = 2024


def record(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def summarize(results):
    return "; ".join(
        f"{r.name} {r.trials - r.failures}/{r.trials} (max {r.max_residual:.1e})" for r in results
    )


def test_c1_operator_identities():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    results = [
        check(rng, MS, PS, TRIALS)
        for check in (
            V.check_isometry,
            V.check_product_rule,
            V.check_gradient_of_chaos,
            V.check_covariance_identity,
            V.check_duality,
            V.check_chaos_round_trip,
            V.check_ou_inverse,
        )
    ]
    elapsed = time.perf_counter() - t0
    ok = all(r.passed and r.max_residual < 1e-10 for r in results) and elapsed < 60
    assert record("C1 operator identities (<1e-10, <60 s)", ok, f"{elapsed:.1f} s; " + summarize(results))


def test_c2_inequalities():
    rng = np.random.default_rng(SEED + 1)
    t0 = time.perf_counter()
    results = [
        V.check_kolmogorov_bound(rng, MS, PS, TRIALS),
        V.check_contraction_norm_strict(rng, TRIALS),
        V.check_contraction_norm_equal(rng, TRIALS),
        V.check_skorokhod(rng, MS, PS, TRIALS),
        V.check_mehler(rng, MS, PS, TRIALS, alphas=(1, 2, 4)),
    ]
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results) and elapsed < 120
    assert record("C2 inequality suite (0 violations, <120 s)", ok, f"{elapsed:.1f} s; " + summarize(results))


def test_c3_multiplication_formula():
    rng = np.random.default_rng(SEED + 2)
    # 15 order pairs with n + m <= 6, each at p = 0.3 and 0.5, three kernel draws apiece
    r = V.check_multiplication_formula(rng, 15 * 2 * 3, ps=(0.3, 0.5), size=10, max_total=6)
    ok = r.passed and r.max_residual < 1e-10
    assert record("C3 multiplication formula (<1e-10)", ok, summarize([r]))


def test_c4_kernel_reconstruction():
    results = V.check_kernel_reconstruction(graph_names=("edge", "path2", "star3", "triangle"), ps=(0.2, 0.5, 0.7), n_max=5)
    rec, var = results
    ok = rec.passed and rec.max_residual < 1e-9 and var.passed and var.max_residual < 1e-9
    assert record("C4 kernel reconstruction (<1e-9)", ok, summarize(results))


def test_c5_closed_form_agreement():
    r = V.check_closed_forms(points=200, seed=SEED)
    ok = r.passed and r.max_residual < 1e-12
    assert record("C5 closed form = general bound (200-point grid)", ok, summarize([r]))


def test_c6_variance_equivalence():
    worst_ratio = (math.inf, -math.inf)
    worst_drift = 0.0
    for G in (triangle(), cycle_graph(4)):
        for p in (0.1, 0.3, 0.5, 0.8):
            logs = {}
            for n in range(10, 41):
                ratio = variance_exact(G, n, p) / variance_asymptotic(G, n, p)
                worst_ratio = (min(worst_ratio[0], ratio), max(worst_ratio[1], ratio))
                logs[n] = math.log(ratio)
            for n in range(10, 21):
                worst_drift = max(worst_drift, abs(logs[2 * n] - logs[n]))
    ok = 1e-2 <= worst_ratio[0] and worst_ratio[1] <= 1e2 and worst_drift <= 0.5
    assert record(
        "C6 variance equivalence",
        ok,
        f"ratio in [{worst_ratio[0]:.3f}, {worst_ratio[1]:.3f}], max log drift per doubling {worst_drift:.3f}",
    )


@pytest.mark.slow
@pytest.mark.parametrize(
    "label,alpha,c,ns,target",
    [
        ("C7a triangle alpha=0, p=0.5", 0.0, 0.5, [16, 32, 64, 128], -1.0),
        ("C7b triangle alpha=0.7, c=1", 0.7, 1.0, [32, 64, 128, 256], -0.45),
    ],
)
def test_c7_monte_carlo_scaling(label, alpha, c, ns, target):
    t0 = time.perf_counter()
    study = scaling_study(triangle(), alpha, ns, c=c, reps=20_000, seed=SEED)
    elapsed = time.perf_counter() - t0
    ok = abs(study.fitted_slope - target) <= 0.3 and abs(study.predicted_slope - target) < 1e-12 and elapsed < 600
    pts = ", ".join(f"n={pt.n}: {pt.dk_hat:.4f}" for pt in study.points)
    assert record(
        f"{label} (slope {target} +/- 0.3)",
        ok,
        f"fitted {study.fitted_slope:.3f}, predicted {study.predicted_slope:.3f}, {elapsed:.0f} s; dK_hat {pts}. "
        "Only exponents are compared, the constants in the bound are unknown",
    )


NORMALITY_NS = [10, 100, 1000, 10_000]
NORMALITY_CASES = [
    # (graph, rule, expected verdict); beta: triangle 1, C4 1, K4 3/2, K5 2, path3/star3 3/4, edge 1/2
    (triangle(), PowerRule(0.9), True),
    (triangle(), PowerRule(1.1), False),
    (triangle(), PowerRule(1.0), False),
    (triangle(), PowerRule(0.0, 0.5), True),
    (complete_graph(4), PowerRule(0.6), True),
    (complete_graph(4), PowerRule(2 / 3), False),
    (complete_graph(4), PowerRule(0.7), False),
    (cycle_graph(4), PowerRule(0.95), True),
    (path_graph(3), PowerRule(1.3), True),
    (path_graph(3), PowerRule(4 / 3), False),
    (star_graph(3), PowerRule(1.2), True),
    (complete_graph(5), PowerRule(0.45), True),
    (complete_graph(5), PowerRule(0.5), False),
    (triangle(), ComplementPowerRule(1.5), True),
    (triangle(), ComplementPowerRule(2.0), False),
    (cycle_graph(4), ComplementPowerRule(3.0), False),
    (triangle(), lambda n: math.log(n) / n, True),
    (triangle(), lambda n: 1 / (n * math.log(n)), False),
    (edge_graph(), lambda n: n**-1.9, True),
    (complete_graph(4), lambda n: 1 - n**-3.0, False),
]


def test_c8_normality_threshold():
    wrong = []
    kinds = {"sparse": 0, "dense": 0}
    for i, (G, rule, expected) in enumerate(NORMALITY_CASES):
        v = asymptotic_normality_check(G, NORMALITY_NS, rule)
        if v.normal != expected:
            wrong.append(i)
        kinds["sparse"] += not v.sparse_condition
        kinds["dense"] += not v.dense_condition
    ok = not wrong and kinds["sparse"] > 0 and kinds["dense"] > 0
    assert record(
        "C8 normality threshold (20 cases)",
        ok,
        f"{len(NORMALITY_CASES) - len(wrong)}/{len(NORMALITY_CASES)} agree; "
        f"failures of n p^beta: {kinds['sparse']}, of n^2(1-p): {kinds['dense']}; mismatched cases {wrong}",
    )


COUNTER_TEMPLATES = {
    "triangle": (triangle(), ["auto", "generic", "triangle-fast", "clique-fast", "cycle-fast"]),
    "path3": (path_graph(3), ["auto", "generic"]),
    "star3": (star_graph(3), ["auto", "generic"]),
    "C4": (cycle_graph(4), ["auto", "generic", "cycle-fast"]),
    "K4": (complete_graph(4), ["auto", "generic", "clique-fast"]),
}


def test_c9_counter_equivalence():
    rng = np.random.default_rng(SEED)
    mismatches = comparisons = 0
    for _ in range(100):
        n = int(rng.integers(4, 13))
        adj = sample_gnp(n, float(rng.uniform(0.2, 0.8)), rng)
        edges = adj.edges()
        for G, counters in COUNTER_TEMPLATES.values():
            truth = brute_force_copies(edges, n, G)
            for counter in counters:
                comparisons += 1
                mismatches += count_copies(adj, G, counter) != truth
    assert record(
        "C9 counter equivalence (100 graphs, 5 templates)",
        mismatches == 0,
        f"{mismatches} mismatches in {comparisons} comparisons",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
