import math

import numpy as np
import pytest

from bernoulli_stein.counts import (
    BudgetExceeded,
    automorphism_count,
    copies_in_Kn,
    copies_through,
    copy_count,
    count_functional,
    mean_count,
    subgraph_count_kernels,
    variance_exact,
)
from bernoulli_stein.graphs import (
    complete_graph,
    cycle_graph,
    edge_graph,
    path_graph,
    star_graph,
    triangle,
)
from bernoulli_stein.space import chaos_project, eval_chaos_sum, expect, variance

from oracles import count_by_enumeration


def test_copy_counts():
    assert copy_count(triangle(), 4) == 4
    assert copy_count(edge_graph(), 5) == 10
    assert copy_count(path_graph(2), 4) == 12
    assert copy_count(cycle_graph(4), 6) == 45
    assert len(copies_in_Kn(path_graph(2), 4)) == 12


def test_automorphisms():
    assert automorphism_count(triangle()) == 6
    assert automorphism_count(cycle_graph(4)) == 8
    assert automorphism_count(star_graph(3)) == 6
    assert automorphism_count(complete_graph(4)) == 24


def test_copies_through_an_edge():
    through = copies_through(triangle(), 4)
    assert set(through[1].values()) == {2}
    assert len(through[1]) == 6


def test_budget():
    with pytest.raises(BudgetExceeded):
        copies_in_Kn(triangle(), 200, budget=1000)
    with pytest.raises(BudgetExceeded):
        count_functional(triangle(), 8, 0.5)


@pytest.mark.parametrize(
    "G,n,p",
    [
        (triangle(), 4, 0.5),
        (path_graph(2), 4, 0.3),
        (star_graph(3), 5, 0.6),
        (cycle_graph(4), 5, 0.4),
        (edge_graph(), 4, 0.2),
    ],
)
def test_moments_against_networkx_enumeration(G, n, p):
    mean, var = count_by_enumeration(G, n, p)
    assert mean_count(G, n, p) == pytest.approx(mean, rel=1e-12)
    assert variance_exact(G, n, p) == pytest.approx(var, rel=1e-10)
    N = count_functional(G, n, p)
    assert expect(N) == pytest.approx(mean, rel=1e-12)
    assert variance(N) == pytest.approx(var, rel=1e-10)


def test_triangle_reconstruction_on_k4():
    N = count_functional(triangle(), 4, 0.5)
    target = (N - expect(N)) / math.sqrt(variance(N))
    F = subgraph_count_kernels(triangle(), 4, 0.5)
    assert np.max(np.abs(eval_chaos_sum(N.space, F).values - target.values)) < 1e-10
    # kernels agree with the projection of the enumerated count
    proj = chaos_project(target, tol=1e-13)
    assert proj.orders == F.orders
    for n in F.orders:
        a, b = F.kernel(n).entries, proj.kernel(n).entries
        assert a.keys() == b.keys()
        assert max(abs(a[t] - b[t]) for t in a) < 1e-12


def test_triangle_variance_on_fifteen_edges():
    N = count_functional(triangle(), 6, 0.2)
    assert variance_exact(triangle(), 6, 0.2) == pytest.approx(variance(N), rel=1e-10)


@pytest.mark.parametrize("G", [path_graph(3), star_graph(3), cycle_graph(4), complete_graph(4)])
def test_kernel_isometry_matches_exact_variance(G):
    for p in (0.2, 0.7):
        F = subgraph_count_kernels(G, 6, p)
        assert F.variance() == pytest.approx(1.0, rel=1e-10)


def test_variance_exact_large_n_is_fast_and_positive():
    v = variance_exact(complete_graph(4), 200, 0.1)
    assert v > 0 and math.isfinite(v)
