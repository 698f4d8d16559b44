"""
Kolmogorov bounds for subgraph counts
=====================================

The bound for the standardized number of copies of G in G(n, p) depends only
on the fewest vertices that e edges of G can span.  The closed forms for
cycles, cliques and trees are the same minimum over two candidates.
"""
# %%
import math

from bernoulli_stein.counts import subgraph_count_kernels, variance_exact
from bernoulli_stein.graphs import (
    PowerRule, asymptotic_normality_check, beta_density, closed_form_bound,
    complete_graph, cycle_graph, kolmogorov_bound_graph, path_graph,
    predicted_slope, subgraph_profile, triangle,
)

for name, G in [("triangle", triangle()), ("C4", cycle_graph(4)), ("K4", complete_graph(4)), ("P3", path_graph(3))]:
    prof = subgraph_profile(G)
    print(f"{name:8s} profile {prof.vmin}  beta={beta_density(G, prof)}")

# %% Which subgraph sets the rate as p moves
n = 10_000
for p in (0.5, 0.05, 0.005, 0.0005):
    r = kolmogorov_bound_graph(triangle(), n, p)
    print(f"p={p:<7} regime {r.regime:18s} bound {r.bound:.3e}")

# %% Closed forms agree with the general minimum
for family, size in [("cycle", 5), ("complete", 4), ("tree", 3)]:
    cf = closed_form_bound(family, size, 1000, 1000 ** -0.6)
    print(f"{family:8s} r={size}: threshold {cf.threshold:.4f}, regime {cf.regime}")

# %% Exact variance against the asymptotic order
for n in (10, 40, 160):
    ratio = variance_exact(triangle(), n, 0.3) / kolmogorov_bound_graph(triangle(), n, 0.3).variance_asymptotic
    print(f"n={n:4d}  Var exact / asymptotic = {ratio:.3f}")

# %% Along p = n^-alpha the rate exponent and the normality verdict
for alpha in (0.0, 0.5, 0.9, 1.1):
    v = asymptotic_normality_check(triangle(), [10, 100, 1000], PowerRule(alpha, 0.5))
    print(f"alpha={alpha}: slope {predicted_slope(triangle(), alpha):+.3f}, normal={v.normal}")

# %% The standardized count is an explicit chaos sum (n = 5, 10 edges)
F = subgraph_count_kernels(triangle(), 5, 0.4)
print({k: len(f.entries) for k, f in F.kernels.items()}, "variance", round(F.variance(), 12))
