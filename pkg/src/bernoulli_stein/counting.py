"""G(n, p) sampling and counting copies of a template graph."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .counts import automorphism_count
from .graphs import GraphSpec, _iter_bits

COUNTERS = ("auto", "triangle-fast", "clique-fast", "cycle-fast", "generic")


class IncompatibleCounter(ValueError):
    pass


class Adjacency:
    """Undirected simple graph on ``n`` vertices with bit-packed rows.

    ``rows[u]`` is a ``uint64`` word array whose bit ``w`` is set iff ``u ~ w``.
    """

    __slots__ = ("n", "rows", "_matrix", "_bitsets")

    def __init__(self, matrix):
        A = np.asarray(matrix, dtype=bool)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if np.any(np.diag(A)) or not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric without loops")
        self.n = A.shape[0]
        self._matrix = A
        self.rows = _pack_rows(A)
        self._bitsets = None

    @classmethod
    def from_edges(cls, n, edges):
        A = np.zeros((n, n), dtype=bool)
        for u, w in edges:
            A[u, w] = A[w, u] = True
        return cls(A)

    def matrix(self) -> np.ndarray:
        return self._matrix

    def edges(self):
        u, w = np.nonzero(np.triu(self._matrix, 1))
        return list(zip(u.tolist(), w.tolist()))

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self._matrix)) // 2

    def bitsets(self):
        """Rows as Python integers, for the backtracking counters."""
        if self._bitsets is None:
            self._bitsets = [
                int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little")
                for r in self._matrix
            ]
        return self._bitsets


def _pack_rows(A):
    n = A.shape[0]
    words = max(1, math.ceil(n / 64))
    padded = np.zeros((n, words * 64), dtype=bool)
    padded[:, :n] = A
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8")


@lru_cache(maxsize=32)
def _lower_edges(n):
    # (w, u) with w > u in the order w(w-1)/2 + u of EdgeIndexing
    return np.tril_indices(n, -1)


def sample_gnp(n: int, p: float, rng) -> Adjacency:
    """Keep each edge of ``K_n`` independently with probability ``p``.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    w, u = _lower_edges(n)
    keep = rng.random(w.size) < p
    A = np.zeros((n, n), dtype=bool)
    A[w[keep], u[keep]] = True
    A[u[keep], w[keep]] = True
    return Adjacency(A)


# -- counters ----------------------------------------------------------------


def count_triangles(adj: Adjacency) -> int:
    """Sum of ``popcount(N(u) & N(w))`` over edges, divided by 3."""
    u, w = np.nonzero(np.triu(adj.matrix(), 1))
    if u.size == 0:
        return 0
    common = adj.rows[u] & adj.rows[w]
    return int(np.bitwise_count(common).sum()) // 3


def count_cliques(adj: Adjacency, r: int) -> int:
    """``K_r`` copies by extending cliques through higher-numbered common neighbours."""
    if r < 1:
        raise ValueError("clique size must be positive")
    rows = adj.bitsets()
    n = adj.n
    if r == 1:
        return n
    higher = [rows[v] & ~((1 << (v + 1)) - 1) for v in range(n)]

    def extend(cand, depth):
        if depth == 1:
            return cand.bit_count()
        total = 0
        for v in _iter_bits(cand):
            nxt = cand & higher[v]
            if nxt.bit_count() >= depth - 1:
                total += extend(nxt, depth - 1)
        return total

    return sum(extend(higher[v], r - 1) for v in range(n))


def count_cycles(adj: Adjacency, r: int) -> int:
    """``C_r`` copies from closed-walk counts; ``r >= 5`` falls back to backtracking."""
    if r < 3:
        raise ValueError("cycles need r >= 3")
    A = adj.matrix().astype(np.int64)
    if r == 3:
        A2 = A @ A
        return int(np.einsum("ij,ji->", A2, A)) // 6
    if r == 4:
        A2 = A @ A
        walks = int(np.einsum("ij,ji->", A2, A2))
        deg = A.sum(axis=1)
        edges = int(deg.sum()) // 2
        cherries = int((deg * (deg - 1) // 2).sum())
        # closed 4-walks: 8 per 4-cycle, 2 per edge, 4 per path of length 2
        return (walks - 2 * edges - 4 * cherries) // 8
    from .graphs import cycle_graph

    return count_generic(adj, cycle_graph(r))


def _search_order(G: GraphSpec):
    masks = G.neighbor_masks()
    order = []
    placed = 0
    while len(order) < G.v:
        # prefer the vertex with most already-placed neighbours, then highest degree
        best = max(
            (v for v in range(G.v) if not placed >> v & 1),
            key=lambda v: ((masks[v] & placed).bit_count(), masks[v].bit_count()),
        )
        order.append(best)
        placed |= 1 << best
    back = [[order.index(x) for x in _iter_bits(masks[v]) if x in order[:i]] for i, v in enumerate(order)]
    return order, back


def count_generic(adj: Adjacency, G: GraphSpec) -> int:
    """Injective edge-preserving maps ``G -> host`` divided by ``|Aut G|``."""
    rows = adj.bitsets()
    full = (1 << adj.n) - 1
    order, back = _search_order(G)
    k = len(order)
    image = [0] * k

    def place(i, used):
        if i == k:
            return 1
        cand = full & ~used
        for j in back[i]:
            cand &= rows[image[j]]
        total = 0
        for x in _iter_bits(cand):
            image[i] = x
            total += place(i + 1, used | (1 << x))
        return total

    return place(0, 0) // automorphism_count(G)


def default_counter(G: GraphSpec) -> str:
    if G.v == 3 and G.e == 3:
        return "triangle-fast"
    if G.is_complete():
        return "clique-fast"
    if G.is_cycle() and G.v <= 4:
        return "cycle-fast"
    return "generic"


def count_copies(adj: Adjacency, G: GraphSpec, counter: str = "auto") -> int:
    """Number of distinct edge-set copies of ``G`` in ``adj``."""
    if counter == "auto":
        counter = default_counter(G)
    if counter == "triangle-fast":
        if not (G.v == 3 and G.e == 3):
            raise IncompatibleCounter("triangle-fast only counts triangles")
        return count_triangles(adj)
    if counter == "clique-fast":
        if not G.is_complete():
            raise IncompatibleCounter("clique-fast needs a complete template")
        return count_cliques(adj, G.v)
    if counter == "cycle-fast":
        if not G.is_cycle():
            raise IncompatibleCounter("cycle-fast needs a cycle template")
        return count_cycles(adj, G.v)
    if counter == "generic":
        return count_generic(adj, G)
    raise ValueError(f"unknown counter {counter!r}; choose from {COUNTERS}")
