"""Template graphs, subgraph profiles and Kolmogorov-rate bounds for G(n, p).

A subgraph ``H`` of ``G`` is an edge subset together with the vertices it
touches, so ``v_H`` never counts isolated vertices.  Every bound here only
depends on the profile ``e -> vmin(e)``, the fewest vertices spanned by ``e``
edges of ``G``: for fixed ``e_H`` the quantity ``n^{v_H} p^{e_H}`` is smallest
at ``v_H = vmin(e_H)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

Edge = Tuple[int, int]

# values of n^v p^e closer than this in log space are treated as ties
TIE_TOL = 1e-12
EXHAUSTIVE_MAX_VERTICES = 24


class GraphFormatError(ValueError):
    """Malformed graph description."""


class IsolatedVertexError(ValueError):
    """The template graph has a vertex without edges."""


class ProfileTooLarge(ValueError):
    """Exhaustive profile enumeration refused; pass ``approx=True``."""


@dataclass(frozen=True)
class GraphSpec:
    """A finite simple graph on vertices ``0 .. v-1`` without isolated vertices."""

    v: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        if self.v < 2:
            raise GraphFormatError("a template graph needs at least 2 vertices")
        seen = set()
        clean = []
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise GraphFormatError(f"loop at vertex {a}")
            if not (0 <= a < self.v and 0 <= b < self.v):
                raise GraphFormatError(f"edge ({a}, {b}) out of range for v={self.v}")
            e = (min(a, b), max(a, b))
            if e in seen:
                raise GraphFormatError(f"duplicate edge {e}")
            seen.add(e)
            clean.append(e)
        if not clean:
            raise GraphFormatError("a template graph needs at least one edge")
        touched = {x for e in clean for x in e}
        if len(touched) != self.v:
            missing = sorted(set(range(self.v)) - touched)
            raise IsolatedVertexError(f"isolated vertices {missing}")
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def e(self) -> int:
        return len(self.edges)

    def degrees(self) -> List[int]:
        d = [0] * self.v
        for a, b in self.edges:
            d[a] += 1
            d[b] += 1
        return d

    def neighbor_masks(self) -> List[int]:
        masks = [0] * self.v
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return masks

    def is_connected(self) -> bool:
        masks = self.neighbor_masks()
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            for u in _iter_bits(frontier):
                nxt |= masks[u]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.v) - 1

    def is_complete(self) -> bool:
        return self.e == self.v * (self.v - 1) // 2

    def is_cycle(self) -> bool:
        return self.v >= 3 and all(d == 2 for d in self.degrees()) and self.is_connected()

    def is_tree(self) -> bool:
        return self.e == self.v - 1 and self.is_connected()

    def without_edge(self, edge: Edge) -> "GraphSpec":
        """Drop one edge and any vertex it leaves isolated (relabelled densely)."""
        rest = [x for x in self.edges if x != tuple(sorted(edge))]
        return graph_from_edges(rest)


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def graph_from_edges(edges: Iterable[Edge]) -> GraphSpec:
    """Build a graph from an edge list, relabelling the touched vertices ``0..v-1``."""
    edges = list(edges)
    verts = sorted({x for e in edges for x in e})
    relabel = {x: i for i, x in enumerate(verts)}
    return GraphSpec(len(verts), tuple((relabel[a], relabel[b]) for a, b in edges))


def edge_graph() -> GraphSpec:
    return GraphSpec(2, ((0, 1),))


def path_graph(r: int) -> GraphSpec:
    """Path with ``r`` edges."""
    return GraphSpec(r + 1, tuple((i, i + 1) for i in range(r)))


def star_graph(r: int) -> GraphSpec:
    """Star with ``r`` edges."""
    return GraphSpec(r + 1, tuple((0, i) for i in range(1, r + 1)))


def cycle_graph(r: int) -> GraphSpec:
    if r < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return GraphSpec(r, tuple((i, (i + 1) % r) for i in range(r)))


def complete_graph(r: int) -> GraphSpec:
    if r < 2:
        raise ValueError("a complete graph needs at least 2 vertices")
    return GraphSpec(r, tuple(combinations(range(r), 2)))


def triangle() -> GraphSpec:
    return complete_graph(3)


# -- file format -------------------------------------------------------------


def parse_graph(text: str) -> GraphSpec:
    """Parse ``v e`` followed by ``e`` lines ``u w`` (0-based)."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GraphFormatError("empty graph file")
    try:
        header = [int(x) for x in rows[0]]
        if len(header) != 2:
            raise GraphFormatError("first line must be 'v e'")
        v, e = header
        body = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"non-integer token: {exc}") from None
    if len(body) != e:
        raise GraphFormatError(f"header announces {e} edges, found {len(body)}")
    if any(len(r) != 2 for r in body):
        raise GraphFormatError("each edge line must contain exactly two vertices")
    return GraphSpec(v, tuple(body))


def read_graph(path) -> GraphSpec:
    with open(path) as fh:
        return parse_graph(fh.read())


def format_graph(G: GraphSpec) -> str:
    return "".join([f"{G.v} {G.e}\n"] + [f"{a} {b}\n" for a, b in G.edges])


# -- edge indexing in K_n ----------------------------------------------------


@dataclass(frozen=True)
class EdgeIndexing:
    """Bijection between edges ``{u < w}`` of ``K_n`` and ``0 .. C(n,2)-1``."""

    n: int

    @property
    def m(self) -> int:
        return self.n * (self.n - 1) // 2

    def index(self, u: int, w: int) -> int:
        if u == w or not (0 <= u < self.n and 0 <= w < self.n):
            raise ValueError(f"({u}, {w}) is not an edge of K_{self.n}")
        u, w = min(u, w), max(u, w)
        return w * (w - 1) // 2 + u

    def edge(self, i: int) -> Edge:
        if not 0 <= i < self.m:
            raise ValueError(f"edge index {i} out of range")
        w = (1 + math.isqrt(1 + 8 * i)) // 2
        while w * (w - 1) // 2 > i:
            w -= 1
        return i - w * (w - 1) // 2, w


# -- subgraph profile --------------------------------------------------------


@dataclass(frozen=True)
class SubgraphProfile:
    """``vmin[e]`` for ``e = 1 .. e_G``; ``exact`` is False for the greedy fallback."""

    vmin: Dict[int, int]
    exact: bool = True

    def items(self):
        return sorted(self.vmin.items())


def _min_vertices_lower_bound(e: int) -> int:
    # s vertices hold at most s(s-1)/2 edges
    return math.ceil((1 + math.sqrt(1 + 8 * e)) / 2 - 1e-12)


def subgraph_profile(G: GraphSpec, approx: bool = False) -> SubgraphProfile:
    """Fewest vertices spanned by ``e`` edges of ``G``, for every ``e``.

    The exact search runs over vertex subsets in increasing size, starting at
    the clique lower bound and stopping as soon as every edge count is
    realised; an ``s``-set realises every ``e`` up to its induced edge count.
    Graphs with more than 24 vertices need ``approx=True``, which uses greedy
    minimum-degree peeling and yields upper bounds on ``vmin``.
    """
    if G.v > EXHAUSTIVE_MAX_VERTICES:
        if not approx:
            raise ProfileTooLarge(
                f"exhaustive profile limited to {EXHAUSTIVE_MAX_VERTICES} vertices (v={G.v})"
            )
        return _greedy_profile(G)

    masks = G.neighbor_masks()
    vmin: Dict[int, int] = {}
    best = 0  # all e <= best are already assigned
    s = 2
    while best < G.e:
        s = max(s, _min_vertices_lower_bound(best + 1))
        top = 0
        for S in combinations(range(G.v), s):
            bits = 0
            for u in S:
                bits |= 1 << u
            inner = sum((masks[u] & bits).bit_count() for u in S) // 2
            if inner > top:
                top = inner
                if top == s * (s - 1) // 2 or top == G.e:
                    break
        for e in range(best + 1, top + 1):
            vmin[e] = s
        best = max(best, top)
        s += 1
    return SubgraphProfile(vmin)


def _greedy_profile(G: GraphSpec) -> SubgraphProfile:
    masks = G.neighbor_masks()
    alive = (1 << G.v) - 1
    sizes = []
    edges = G.e
    for size in range(G.v, 1, -1):
        sizes.append((size, edges))
        u = min(_iter_bits(alive), key=lambda x: (masks[x] & alive).bit_count())
        edges -= (masks[u] & alive).bit_count()
        alive &= ~(1 << u)
    vmin = {}
    for e in range(1, G.e + 1):
        vmin[e] = min(s for s, k in sizes if k >= e)
    # a single edge always spans exactly two vertices
    vmin[1] = 2
    return SubgraphProfile(vmin, exact=False)


def beta_density(G: GraphSpec, profile: SubgraphProfile | None = None) -> Fraction:
    """``max e_H / v_H`` over subgraphs with at least one edge."""
    profile = profile or subgraph_profile(G)
    return max(Fraction(e, v) for e, v in profile.items())


# -- bounds ------------------------------------------------------------------


def _exp_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rate_label(v: int, e: int) -> str:
    """Human label for ``(n^v p^e)^{-1/2}``, e.g. ``(np)^{-3/2}``."""
    if v == e:
        return f"(np)^{{-{_exp_str(Fraction(v, 2))}}}"
    return f"n^{{-{_exp_str(Fraction(v, 2))}}} p^{{-{_exp_str(Fraction(e, 2))}}}"


def _check_np(n, p, G=None):
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if G is not None and n < G.v:
        raise ValueError(f"n={n} is smaller than v_G={G.v}")


def _log_terms(profile: SubgraphProfile, n, p):
    ln, lp = math.log(n), math.log(p)
    return [(v * ln + e * lp, v, e) for e, v in profile.items()]


def _argmin_term(terms):
    low = min(t[0] for t in terms)
    # ties go to the larger subgraph, i.e. the small-p branch
    return max((t for t in terms if t[0] <= low + TIE_TOL), key=lambda t: t[2])


@dataclass(frozen=True)
class GraphBoundReport:
    n: int
    p: float
    log_min_term: float
    minimizer: Tuple[int, int]  # (v_H, e_H)
    log_bound: float
    log_variance_asymptotic: float
    regime: str
    beta: Fraction
    variance_exact: Optional[float] = None

    @property
    def min_term(self) -> float:
        return _safe_exp(self.log_min_term)

    @property
    def bound(self) -> float:
        return _safe_exp(self.log_bound)

    @property
    def variance_asymptotic(self) -> float:
        return _safe_exp(self.log_variance_asymptotic)


def _safe_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def kolmogorov_bound_graph(
    G: GraphSpec,
    n: int,
    p: float,
    profile: SubgraphProfile | None = None,
    with_exact_variance: bool = False,
) -> GraphBoundReport:
    """``((1-p) min_H n^{v_H} p^{e_H})^{-1/2}`` and its ingredients, in log space."""
    _check_np(n, p, G)
    profile = profile or subgraph_profile(G)
    log_min, v, e = _argmin_term(_log_terms(profile, n, p))
    log_q = math.log1p(-p)
    log_bound = -0.5 * (log_q + log_min)
    log_var = log_q + 2 * G.v * math.log(n) + 2 * G.e * math.log(p) - log_min
    var_exact = None
    if with_exact_variance:
        from .counts import variance_exact

        var_exact = variance_exact(G, n, p)
    return GraphBoundReport(
        n=n,
        p=p,
        log_min_term=log_min,
        minimizer=(v, e),
        log_bound=log_bound,
        log_variance_asymptotic=log_var,
        regime=rate_label(v, e),
        beta=beta_density(G, profile),
        variance_exact=var_exact,
    )


def variance_asymptotic(G: GraphSpec, n: int, p: float, profile=None) -> float:
    """``(1-p) max_H n^{2v_G - v_H} p^{2e_G - e_H}``."""
    return kolmogorov_bound_graph(G, n, p, profile).variance_asymptotic


@dataclass(frozen=True)
class ClosedFormBound:
    family: str
    size: int
    regime: str
    log_bound: float
    threshold: float
    minimizer: Tuple[int, int]

    @property
    def bound(self) -> float:
        return _safe_exp(self.log_bound)


FAMILIES = ("cycle", "complete", "tree")


def family_graph(family: str, r: int, shape: str = "path") -> GraphSpec:
    """Representative graph of a closed-form family; trees default to paths."""
    if family == "cycle":
        return cycle_graph(r)
    if family == "complete":
        return complete_graph(r)
    if family == "tree":
        return star_graph(r) if shape == "star" else path_graph(r)
    raise ValueError(f"unknown family {family!r}")


def closed_form_bound(family: str, r: int, n: int, p: float) -> ClosedFormBound:
    """Closed-form bound for cycles (``r`` vertices), cliques (``r`` vertices) or trees (``r`` edges).

    In each family the minimum over subgraphs reduces to two candidates, the
    single edge ``n^2 p`` and the whole graph; the regime switches at the
    family threshold (``n^{-(r-2)/(r-1)}``, ``n^{-2/(r+1)}`` or ``1/n``).
    """
    _check_np(n, p)
    if family == "cycle":
        if r < 3:
            raise ValueError("cycles need r >= 3")
        big = (r, r)
        threshold = n ** (-(r - 2) / (r - 1))
    elif family == "complete":
        if r < 3:
            raise ValueError("complete graphs need r >= 3")
        big = (r, r * (r - 1) // 2)
        threshold = n ** (-2 / (r + 1))
    elif family == "tree":
        if r < 1:
            raise ValueError("trees need r >= 1")
        big = (r + 1, r)
        threshold = 1.0 / n
    else:
        raise ValueError(f"unknown family {family!r}")
    if n < big[0]:
        raise ValueError(f"n={n} is smaller than the graph order {big[0]}")
    ln, lp = math.log(n), math.log(p)
    edge_term = 2 * ln + 1 * lp
    big_term = big[0] * ln + big[1] * lp
    if big_term <= edge_term + TIE_TOL:
        log_min, minimizer = big_term, big
    else:
        log_min, minimizer = edge_term, (2, 1)
    return ClosedFormBound(
        family=family,
        size=r,
        regime=rate_label(*minimizer),
        log_bound=-0.5 * (math.log1p(-p) + log_min),
        threshold=threshold,
        minimizer=minimizer,
    )


def predicted_slope(G: GraphSpec, alpha: float, profile=None) -> float:
    """Exponent of ``n`` in the bound along ``p = c n^{-alpha}`` as ``n -> inf``."""
    profile = profile or subgraph_profile(G)
    return -0.5 * min(v - alpha * e for e, v in profile.items())


# -- asymptotic normality ----------------------------------------------------


@dataclass(frozen=True)
class PowerRule:
    """``p_n = c n^{-alpha}``."""

    alpha: float
    c: float = 1.0

    def __call__(self, n):
        return self.c * n ** (-self.alpha)


@dataclass(frozen=True)
class ComplementPowerRule:
    """``p_n = 1 - c n^{-gamma}``."""

    gamma: float
    c: float = 1.0

    def __call__(self, n):
        return 1.0 - self.c * n ** (-self.gamma)


@dataclass(frozen=True)
class NormalityVerdict:
    normal: bool
    sparse_condition: bool  # n p^beta -> inf
    dense_condition: bool  # n^2 (1 - p) -> inf
    beta: Fraction
    reason: str
    log_sparse: Tuple[float, ...] = field(default=(), repr=False)
    log_dense: Tuple[float, ...] = field(default=(), repr=False)


def _diverges(ns, logs, slope_tol=1e-6):
    x = np.log(np.asarray(ns, dtype=float))
    y = np.asarray(logs, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two sequence points to judge divergence")
    slope = np.polyfit(x, y, 1)[0]
    return bool(slope > slope_tol and y[-1] > y[0])


def asymptotic_normality_check(
    G: GraphSpec,
    n_sequence: Sequence[int],
    p_rule: Union[PowerRule, ComplementPowerRule, Callable[[int], float]],
    profile=None,
) -> NormalityVerdict:
    """Decide whether the standardized count of ``G`` is asymptotically normal.

    Normality holds iff ``n p^beta -> inf`` and ``n^2 (1-p) -> inf``.  Power
    rules are decided exactly from their exponents (``alpha < 1/beta`` and
    ``gamma < 2``); any other callable is judged from the log-log trend of both
    quantities along ``n_sequence``.
    """
    beta = beta_density(G, profile or subgraph_profile(G))
    ns = list(n_sequence)
    ps = [float(p_rule(n)) for n in ns]
    if any(not 0.0 < p < 1.0 for p in ps):
        raise ValueError("p_rule must map every n into (0, 1)")
    log_sparse = tuple(math.log(n) + float(beta) * math.log(p) for n, p in zip(ns, ps))
    log_dense = tuple(2 * math.log(n) + math.log1p(-p) for n, p in zip(ns, ps))

    if isinstance(p_rule, PowerRule):
        if p_rule.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        sparse = p_rule.alpha * float(beta) < 1.0 - 1e-12
        dense = True
        reason = f"alpha={p_rule.alpha:g} vs 1/beta={float(1 / beta):g}"
    elif isinstance(p_rule, ComplementPowerRule):
        if p_rule.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        sparse = True
        dense = p_rule.gamma < 2.0 - 1e-12
        reason = f"n^2 (1-p) ~ n^{2 - p_rule.gamma:g}"
    else:
        sparse = _diverges(ns, log_sparse)
        dense = _diverges(ns, log_dense)
        reason = "log-log trend along the sequence"
    if not sparse:
        reason += "; n p^beta stays bounded"
    if not dense:
        reason += "; n^2 (1-p) stays bounded"
    return NormalityVerdict(sparse and dense, sparse, dense, beta, reason, log_sparse, log_dense)
