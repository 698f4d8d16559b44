"""Subgraph counts in G(n, p) as finite chaos sums.

Edges of ``K_n`` are the Bernoulli coordinates (see :class:`EdgeIndexing`).
The count ``N_G`` of copies of ``G`` expands as

    N_G = sum_S p^{e_G - |S|} (pq)^{|S|/2} #{copies C >= S} prod_{b in S} Y_b

which gives the kernels of the standardized count and, pairing copies by
their shared edges, its exact variance.
"""
from __future__ import annotations

import math
from collections import defaultdict
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from .graphs import EdgeIndexing, GraphSpec
from .kernels import ChaosSum, SymmetricKernel
from .space import Functional, OutcomeSpace

COPY_BUDGET = 10**6


class BudgetExceeded(ValueError):
    """Enumeration would exceed the configured size budget."""


@lru_cache(maxsize=64)
def labeled_copies(G: GraphSpec) -> Tuple[FrozenSet[Tuple[int, int]], ...]:
    """Distinct edge sets of copies of ``G`` on the vertex set ``0 .. v_G-1``."""
    if G.v > 10:
        raise BudgetExceeded(f"labeled copy enumeration needs v_G <= 10 (v={G.v})")
    out = set()
    for perm in permutations(range(G.v)):
        out.add(frozenset(tuple(sorted((perm[a], perm[b]))) for a, b in G.edges))
    return tuple(sorted(out, key=sorted))


def automorphism_count(G: GraphSpec) -> int:
    return math.factorial(G.v) // len(labeled_copies(G))


def copy_count(G: GraphSpec, n: int) -> int:
    """Number of copies of ``G`` in ``K_n``: ``C(n, v_G) v_G! / |Aut G|``."""
    return math.comb(n, G.v) * len(labeled_copies(G))


def copies_in_Kn(G: GraphSpec, n: int, budget: int = COPY_BUDGET) -> List[Tuple[int, ...]]:
    """Every copy of ``G`` in ``K_n`` as a sorted tuple of edge indices."""
    total = copy_count(G, n)
    if total > budget:
        raise BudgetExceeded(f"{total} copies exceed the budget of {budget}")
    idx = EdgeIndexing(n)
    tmpl = labeled_copies(G)
    out = []
    for verts in combinations(range(n), G.v):
        for copy in tmpl:
            out.append(tuple(sorted(idx.index(verts[a], verts[b]) for a, b in copy)))
    return out


def mean_count(G: GraphSpec, n: int, p: float) -> float:
    return copy_count(G, n) * p**G.e


def variance_exact(G: GraphSpec, n: int, p: float) -> float:
    """``Var N_G = sum over copy pairs (C, C') of p^{2e - |C & C'|} - p^{2e}``.

    All copies are equivalent under vertex permutations, so the double sum is
    ``#copies`` times the sum over partners ``C'`` of one fixed copy ``C0``.
    A partner sharing an edge with ``C0`` uses ``s <= v_G - 2`` vertices outside
    ``C0``; partners with a given set of ``s`` outside vertices are enumerated
    once and weighted by ``C(n - v_G, s)``.
    """
    if n < G.v:
        return 0.0
    v, e = G.v, G.e
    base = frozenset(G.edges)
    tmpl = labeled_copies(G)
    log_p = math.log(p)
    per_copy = 0.0
    for s in range(0, min(v - 2, n - v) + 1):
        outside = tuple(range(v, v + s))
        acc = 0.0
        for inside in combinations(range(v), v - s):
            verts = inside + outside
            for copy in tmpl:
                mapped = {tuple(sorted((verts[a], verts[b]))) for a, b in copy}
                j = len(base & mapped)
                if j:
                    acc += math.exp((2 * e - j) * log_p) * -math.expm1(j * log_p)
        per_copy += math.comb(n - v, s) * acc
    return copy_count(G, n) * per_copy


def copies_through(G: GraphSpec, n: int, budget: int = COPY_BUDGET) -> Dict[int, Dict[Tuple[int, ...], int]]:
    """``#{copies C containing S}`` for every nonempty edge set ``S``, grouped by ``|S|``."""
    out: Dict[int, Dict[Tuple[int, ...], int]] = defaultdict(lambda: defaultdict(int))
    for copy in copies_in_Kn(G, n, budget):
        for k in range(1, G.e + 1):
            for S in combinations(copy, k):
                out[k][S] += 1
    return {k: dict(v) for k, v in out.items()}


def completion_counts(G: GraphSpec, n: int, budget: int = COPY_BUDGET):
    """``g_k(b)``: ordered edge sequences completing ``b`` to a copy of ``G``.

    Each copy containing ``b`` contributes the ``(e_G - k)!`` orderings of its
    remaining edges.
    """
    e = G.e
    return {
        k: {S: math.factorial(e - k) * c for S, c in counts.items()}
        for k, counts in copies_through(G, n, budget).items()
    }


def subgraph_count_kernels(G: GraphSpec, n: int, p: float, budget: int = COPY_BUDGET) -> ChaosSum:
    """Chaos kernels of ``(N_G - E N_G) / sqrt(Var N_G)`` on the edges of ``K_n``.

    ``f_k = q^{k/2} p^{e_G - k/2} g_k / ((e_G - k)! k! sqrt(Var N_G))``.
    """
    q = 1.0 - p
    e = G.e
    sd = math.sqrt(variance_exact(G, n, p))
    if sd == 0.0:
        raise ValueError("the count has zero variance")
    kernels = {}
    for k, g in completion_counts(G, n, budget).items():
        scale = q ** (k / 2) * p ** (e - k / 2) / (math.factorial(e - k) * math.factorial(k) * sd)
        kernels[k] = SymmetricKernel(k, {S: scale * v for S, v in g.items()})
    return ChaosSum(0.0, kernels)


def count_functional(G: GraphSpec, n: int, p: float, max_m: int = 22) -> Functional:
    """``N_G`` on every outcome of the ``C(n, 2)``-edge Bernoulli space."""
    m = n * (n - 1) // 2
    if m > max_m:
        raise BudgetExceeded(f"2^{m} outcomes exceed the cap 2^{max_m}")
    space = OutcomeSpace(m, p, max_m=max(max_m, m))
    w = space.outcomes()
    counts = np.zeros(space.size)
    for copy in copies_in_Kn(G, n):
        mask = 0
        for i in copy:
            mask |= 1 << i
        counts += (w & mask) == mask
    return Functional(space, counts)
