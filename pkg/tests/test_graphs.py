import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bernoulli_stein.counts import variance_exact
from bernoulli_stein.graphs import (
    ComplementPowerRule,
    EdgeIndexing,
    GraphFormatError,
    GraphSpec,
    IsolatedVertexError,
    PowerRule,
    ProfileTooLarge,
    asymptotic_normality_check,
    beta_density,
    closed_form_bound,
    complete_graph,
    cycle_graph,
    edge_graph,
    family_graph,
    format_graph,
    graph_from_edges,
    kolmogorov_bound_graph,
    parse_graph,
    path_graph,
    predicted_slope,
    star_graph,
    subgraph_profile,
    triangle,
    variance_asymptotic,
)


def brute_profile(G):
    out = {}
    for e in range(1, G.e + 1):
        out[e] = min(len({x for edge in S for x in edge}) for S in combinations(G.edges, e))
    return out


# -- GraphSpec and file format -----------------------------------------------


def test_graph_validation():
    with pytest.raises(GraphFormatError):
        GraphSpec(3, ((0, 0),))
    with pytest.raises(GraphFormatError):
        GraphSpec(3, ((0, 1), (1, 0)))
    with pytest.raises(GraphFormatError):
        GraphSpec(2, ((0, 2),))
    with pytest.raises(GraphFormatError):
        GraphSpec(2, ())
    with pytest.raises(IsolatedVertexError):
        GraphSpec(4, ((0, 1), (1, 2), (0, 2)))


def test_parse_and_format_round_trip():
    G = parse_graph("4 4\n0 1\n1 2\n2 3\n3 0\n")
    assert G == cycle_graph(4)
    assert parse_graph(format_graph(G)) == G


@pytest.mark.parametrize(
    "text",
    ["", "3\n0 1\n", "3 2\n0 1\n", "3 1\n0 x\n", "3 1\n0 1 2\n", "a b\n"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_parse_isolated_vertex():
    with pytest.raises(IsolatedVertexError):
        parse_graph("4 3\n0 1\n1 2\n0 2\n")


def test_shape_predicates():
    assert triangle().is_complete() and triangle().is_cycle()
    assert cycle_graph(5).is_cycle() and not cycle_graph(5).is_tree()
    assert path_graph(3).is_tree() and star_graph(3).is_tree()
    assert not graph_from_edges([(0, 1), (2, 3)]).is_connected()


def test_without_edge_relabels():
    H = path_graph(3).without_edge((0, 1))
    assert H.v == 3 and H.e == 2


@pytest.mark.parametrize("n", [2, 3, 7, 40])
def test_edge_indexing_bijection(n):
    idx = EdgeIndexing(n)
    seen = set()
    for u, w in combinations(range(n), 2):
        i = idx.index(u, w)
        assert idx.edge(i) == (u, w)
        seen.add(i)
    assert seen == set(range(idx.m))
    with pytest.raises(ValueError):
        idx.index(0, 0)


# -- profile and density ------------------------------------------------------


def test_known_profiles():
    assert subgraph_profile(triangle()).vmin == {1: 2, 2: 3, 3: 3}
    assert subgraph_profile(path_graph(2)).vmin == {1: 2, 2: 3}
    assert subgraph_profile(complete_graph(4)).vmin == {1: 2, 2: 3, 3: 3, 4: 4, 5: 4, 6: 4}


def test_densities():
    assert beta_density(triangle()) == 1
    assert beta_density(complete_graph(4)) == Fraction(3, 2)
    for r in range(1, 6):
        assert beta_density(path_graph(r)) == Fraction(r, r + 1)
        assert beta_density(star_graph(r)) == Fraction(r, r + 1)


@st.composite
def small_graphs(draw, max_v=7):
    v = draw(st.integers(2, max_v))
    pairs = list(combinations(range(v), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=min(len(pairs), 11), unique=True))
    return graph_from_edges(chosen)


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_profile_matches_subset_enumeration(G):
    prof = subgraph_profile(G)
    assert prof.exact
    assert prof.vmin == brute_profile(G)


@settings(max_examples=40, deadline=None)
@given(small_graphs())
def test_greedy_profile_is_an_upper_bound(G):
    from bernoulli_stein.graphs import _greedy_profile

    exact, greedy = subgraph_profile(G).vmin, _greedy_profile(G).vmin
    assert all(greedy[e] >= exact[e] for e in exact)


def test_large_graph_needs_approx():
    G = path_graph(25)
    with pytest.raises(ProfileTooLarge):
        subgraph_profile(G)
    prof = subgraph_profile(G, approx=True)
    assert not prof.exact and prof.vmin[1] == 2 and prof.vmin[25] == 26


# -- bounds ------------------------------------------------------------------


def test_triangle_dense_branch():
    n, p = 500, 0.5
    r = kolmogorov_bound_graph(triangle(), n, p)
    assert r.minimizer == (2, 1)
    assert r.bound * n * math.sqrt(p * (1 - p)) == pytest.approx(1.0)


def test_triangle_intermediate_branch():
    n = 10_000
    p = 0.05  # above n^{-1/2} = 0.01
    r = kolmogorov_bound_graph(triangle(), n, p)
    assert r.minimizer == (2, 1)
    assert r.regime == "n^{-1} p^{-1/2}"


def test_triangle_sparse_branch():
    r = kolmogorov_bound_graph(triangle(), 1000, 0.001)
    assert r.regime == "(np)^{-3/2}"
    n, p = 10_000, 0.005
    r = kolmogorov_bound_graph(triangle(), n, p)
    assert r.bound == pytest.approx((1 - p) ** -0.5 * (n * p) ** -1.5)


def test_cycle_five_sparse():
    n = 1000
    cf = closed_form_bound("cycle", 5, n, n**-0.9)
    assert cf.regime == "(np)^{-5/2}"
    assert kolmogorov_bound_graph(cycle_graph(5), n, n**-0.9).regime == cf.regime


def test_complete_four_small_p():
    n = 1000
    cf = closed_form_bound("complete", 4, n, n**-0.5)
    assert n**-0.5 < cf.threshold
    assert cf.regime == "n^{-2} p^{-3}"


def test_tree_branch():
    n = 1000
    cf = closed_form_bound("tree", 3, n, 2 / n)
    assert cf.regime == "n^{-1} p^{-1/2}"
    assert kolmogorov_bound_graph(path_graph(3), n, 2 / n).regime == cf.regime


@pytest.mark.parametrize("family,r", [("cycle", 3), ("cycle", 6), ("complete", 3), ("complete", 5), ("tree", 1), ("tree", 4)])
def test_closed_form_agrees_at_thresholds(family, r):
    G = family_graph(family, r)
    prof = subgraph_profile(G)
    for n in (20, 300, 5000):
        thr = closed_form_bound(family, r, n, 0.5).threshold
        for p in (thr, thr * 0.999, min(thr * 1.001, 0.99)):
            if not 0 < p < 1:
                continue
            cf = closed_form_bound(family, r, n, p)
            gen = kolmogorov_bound_graph(G, n, p, prof)
            assert cf.regime == gen.regime
            assert abs(cf.log_bound - gen.log_bound) < 1e-12


def test_closed_form_rejects_bad_input():
    with pytest.raises(ValueError):
        closed_form_bound("cycle", 2, 10, 0.5)
    with pytest.raises(ValueError):
        closed_form_bound("wheel", 4, 10, 0.5)
    with pytest.raises(ValueError):
        closed_form_bound("complete", 5, 4, 0.5)
    with pytest.raises(ValueError):
        kolmogorov_bound_graph(triangle(), 10, 1.0)


def test_bound_handles_extreme_parameters():
    r = kolmogorov_bound_graph(complete_graph(4), 10**9, 1e-300)
    assert math.isfinite(r.log_bound)


@pytest.mark.parametrize("G,alpha", [(triangle(), 0.0), (triangle(), 0.7), (complete_graph(4), 0.6), (path_graph(3), 1.2)])
def test_bound_nonincreasing_along_rule(G, alpha):
    rule = PowerRule(alpha, 0.5)
    logs = [kolmogorov_bound_graph(G, n, rule(n)).log_bound for n in range(max(G.v, 10), 3000, 37)]
    assert all(b <= a + 1e-12 for a, b in zip(logs, logs[1:]))


# -- variance ----------------------------------------------------------------


def test_variance_dense_triangle_branch():
    r = kolmogorov_bound_graph(triangle(), 100, 0.5)
    assert r.minimizer == (2, 1)
    assert r.variance_asymptotic == pytest.approx(0.5 * 100**4 * 0.5**5)


def test_variance_single_edge():
    n, p = 30, 0.3
    assert variance_exact(edge_graph(), n, p) == pytest.approx(math.comb(n, 2) * p * (1 - p))
    assert variance_asymptotic(edge_graph(), n, p) == pytest.approx(n * n * p * (1 - p))


def test_variance_ratio_stays_bounded():
    for p in (0.1, 0.3, 0.5, 0.8):
        for n in range(10, 41):
            ratio = variance_exact(triangle(), n, p) / variance_asymptotic(triangle(), n, p)
            assert 0.05 <= ratio <= 20


# -- slopes and normality ----------------------------------------------------


def test_predicted_slopes():
    assert predicted_slope(triangle(), 0.0) == pytest.approx(-1.0)
    assert predicted_slope(triangle(), 0.7) == pytest.approx(-0.45)
    assert predicted_slope(path_graph(3), 0.5) == pytest.approx(-0.75)


def test_normality_examples():
    ns = [10, 100, 1000]
    assert asymptotic_normality_check(triangle(), ns, PowerRule(0.9)).normal
    assert not asymptotic_normality_check(triangle(), ns, PowerRule(1.1)).normal
    v = asymptotic_normality_check(cycle_graph(4), ns, ComplementPowerRule(3.0))
    assert not v.normal and not v.dense_condition and v.sparse_condition


def test_normality_rejects_rules_leaving_unit_interval():
    with pytest.raises(ValueError):
        asymptotic_normality_check(triangle(), [10, 20], lambda n: 2.0)
