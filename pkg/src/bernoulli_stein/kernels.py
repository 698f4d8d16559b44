"""Sparse symmetric kernels and their contraction algebra.

A kernel of order ``n`` is stored by its values on strictly increasing index
tuples; the value at any other ordering of distinct indices is the same, and
it is zero whenever two arguments coincide.  All norms are taken over ordered
tuples, so ``||f||^2 = n! * sum(v**2 for v in entries.values())``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Mapping, Tuple

Index = Tuple[int, ...]


def _canonical(t) -> Index:
    return tuple(sorted(int(i) for i in t))


class SymmetricKernel:
    """Order-``n`` symmetric kernel vanishing on diagonals.

    Parameters
    ----------
    order : int
        Number of arguments.
    entries : mapping
        Sorted tuple of ``order`` distinct indices -> value.  Unsorted keys are
        accepted and canonicalized; repeated indices are rejected.
    """

    __slots__ = ("order", "entries")

    def __init__(self, order: int, entries: Mapping[Index, float] | None = None):
        if order < 0:
            raise ValueError("order must be nonnegative")
        clean: Dict[Index, float] = {}
        for t, v in (entries or {}).items():
            key = _canonical(t)
            if len(key) != order:
                raise ValueError(f"tuple {t} does not have length {order}")
            if len(set(key)) != order:
                raise ValueError(f"tuple {t} has a repeated index")
            if key and key[0] < 0:
                raise ValueError(f"negative index in {t}")
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"non-finite value at {t}")
            clean[key] = clean.get(key, 0.0) + v
        self.order = order
        self.entries = clean

    @classmethod
    def constant(cls, c: float) -> "SymmetricKernel":
        return cls(0, {(): c})

    @classmethod
    def indicator(cls, *indices: int) -> "SymmetricKernel":
        return cls(len(indices), {indices: 1.0})

    def __repr__(self):
        return f"SymmetricKernel(order={self.order}, nnz={len(self.entries)})"

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricKernel)
            and self.order == other.order
            and self.entries == other.entries
        )

    @property
    def support_bound(self) -> int:
        return max((t[-1] + 1 for t in self.entries if t), default=0)

    def __call__(self, *args: int) -> float:
        if len(args) != self.order:
            raise ValueError(f"expected {self.order} arguments")
        key = _canonical(args)
        if len(set(key)) != len(key):
            return 0.0
        return self.entries.get(key, 0.0)

    def scaled(self, a: float) -> "SymmetricKernel":
        return SymmetricKernel(self.order, {t: a * v for t, v in self.entries.items()})

    def __add__(self, other: "SymmetricKernel") -> "SymmetricKernel":
        if other.order != self.order:
            raise ValueError("cannot add kernels of different orders")
        out = dict(self.entries)
        for t, v in other.entries.items():
            out[t] = out.get(t, 0.0) + v
        return SymmetricKernel(self.order, out)

    def norm_sq(self) -> float:
        """Squared norm over ordered tuples."""
        return math.factorial(self.order) * sum(v * v for v in self.entries.values())

    def inner(self, other: "SymmetricKernel") -> float:
        if other.order != self.order:
            return 0.0
        small, big = sorted((self.entries, other.entries), key=len)
        s = sum(v * big.get(t, 0.0) for t, v in small.items())
        return math.factorial(self.order) * s

    def section(self, k: int) -> "SymmetricKernel":
        """``f(*, k)``: fix one argument to ``k``, leaving an order ``n-1`` kernel."""
        if self.order == 0:
            raise ValueError("cannot take a section of an order-0 kernel")
        out = {}
        for t, v in self.entries.items():
            if k in t:
                out[tuple(i for i in t if i != k)] = v
        return SymmetricKernel(self.order - 1, out)

    def to_dense(self, size: int):
        """Full ``(size,)*order`` array, symmetric and zero on diagonals."""
        import numpy as np
        from itertools import permutations

        a = np.zeros((size,) * self.order)
        for t, v in self.entries.items():
            for perm in permutations(t):
                a[perm] = v
        return a


@dataclass(frozen=True)
class ChaosSum:
    """``F = constant + sum_n I_n(kernels[n])``."""

    constant: float = 0.0
    kernels: Dict[int, SymmetricKernel] = field(default_factory=dict)

    def __post_init__(self):
        for n, f in self.kernels.items():
            if n < 1 or f.order != n:
                raise ValueError(f"kernel stored under order {n} has order {f.order}")
        object.__setattr__(self, "kernels", dict(sorted(self.kernels.items())))

    @property
    def orders(self):
        return list(self.kernels)

    @property
    def max_order(self) -> int:
        return max(self.kernels, default=0)

    def kernel(self, n: int) -> SymmetricKernel:
        return self.kernels.get(n) or SymmetricKernel(n)

    def variance(self) -> float:
        return sum(math.factorial(n) * f.norm_sq() for n, f in self.kernels.items())

    def scaled(self, a: float) -> "ChaosSum":
        return ChaosSum(a * self.constant, {n: f.scaled(a) for n, f in self.kernels.items()})


# -- contractions ------------------------------------------------------------


@dataclass(frozen=True)
class ContractionResult:
    """``f *_k^l g`` on ordered argument lists ``(y, z1, z2)``.

    ``y`` holds the ``k - l`` shared free arguments, ``z1`` the remaining
    ``n - k`` arguments of ``f`` and ``z2`` the remaining ``m - k`` of ``g``.
    The value is symmetric inside each block, so ``blocks`` maps the sorted
    triple ``(y, z1, z2)`` to the value.  With ``off_diagonal`` set, outputs
    where two free arguments coincide have been removed.
    """

    n: int
    m: int
    k: int
    l: int
    blocks: Dict[Tuple[Index, Index, Index], float]
    off_diagonal: bool = True

    @property
    def arity(self) -> int:
        return self.n + self.m - self.k - self.l

    @property
    def _multiplicity(self) -> int:
        f = math.factorial
        return f(self.k - self.l) * f(self.n - self.k) * f(self.m - self.k)

    def __call__(self, *args: int) -> float:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        a = self.k - self.l
        b = a + self.n - self.k
        y, z1, z2 = args[:a], args[a:b], args[b:]
        if self.off_diagonal and len(set(args)) != len(args):
            return 0.0
        parts = tuple(_canonical(x) for x in (y, z1, z2))
        if any(len(set(x)) != len(x) for x in parts):
            return 0.0
        return self.blocks.get(parts, 0.0)

    def norm_sq(self) -> float:
        return self._multiplicity * sum(v * v for v in self.blocks.values())

    def symmetrize(self) -> SymmetricKernel:
        """Average over all orderings of the free arguments."""
        if not self.off_diagonal:
            raise ValueError("symmetrization is defined for the off-diagonal contraction")
        N = self.arity
        w = self._multiplicity / math.factorial(N)
        out: Dict[Index, float] = defaultdict(float)
        for (y, z1, z2), v in self.blocks.items():
            out[_canonical(y + z1 + z2)] += w * v
        return SymmetricKernel(N, out)


def _check_orders(f, g, k, l):
    if not 0 <= l <= k <= min(f.order, g.order):
        raise ValueError(
            f"need 0 <= l <= k <= min(n, m); got k={k}, l={l}, n={f.order}, m={g.order}"
        )


def contract(
    f: SymmetricKernel,
    g: SymmetricKernel,
    k: int,
    l: int,
    off_diagonal: bool = True,
) -> ContractionResult:
    """Contraction ``f *_k^l g``.

    The first ``l`` arguments are summed, the next ``k - l`` are shared and
    kept free.  Entries of ``g`` are bucketed by their ``k``-subsets so only
    pairs with a common ``k``-set are visited.

    ``off_diagonal=False`` omits the indicator on the free arguments; that form
    is what appears inside Cauchy-Schwarz style estimates.
    """
    _check_orders(f, g, k, l)
    buckets: Dict[Index, list] = defaultdict(list)
    for B, gv in g.entries.items():
        for K in combinations(B, k):
            buckets[K].append((B, gv))

    lf = math.factorial(l)
    blocks: Dict[Tuple[Index, Index, Index], float] = defaultdict(float)
    for A, fv in f.entries.items():
        Aset = set(A)
        for K in combinations(A, k):
            matches = buckets.get(K)
            if not matches:
                continue
            Kset = set(K)
            z1 = tuple(i for i in A if i not in Kset)
            for B, gv in matches:
                if off_diagonal and len(Aset.intersection(B)) != k:
                    continue
                z2 = tuple(i for i in B if i not in Kset)
                for X in combinations(K, l):
                    y = tuple(i for i in K if i not in X)
                    blocks[(y, z1, z2)] += lf * fv * gv
    return ContractionResult(f.order, g.order, k, l, dict(blocks), off_diagonal)


def contraction_norm_sq(f, g, k: int, l: int, off_diagonal: bool = True) -> float:
    """``||f *_k^l g||^2`` over ordered free tuples."""
    return contract(f, g, k, l, off_diagonal=off_diagonal).norm_sq()


def product_coefficient(p: float) -> float:
    """Coefficient ``phi`` in ``Y^2 = 1 + phi * Y`` for a normalized Bernoulli ``Y``."""
    q = 1.0 - p
    return (q - p) / math.sqrt(p * q)


def multiply_chaos(f: SymmetricKernel, g: SymmetricKernel, p: float) -> Dict[int, SymmetricKernel]:
    """Kernels ``h_s`` with ``I_n(f) I_m(g) = sum_s I_{n+m-s}(h_s)``.

    Returns a dict keyed by ``s = 0 .. 2 min(n, m)``; ``h_s`` has order
    ``n + m - s``.  The sum over ``i`` runs over ``ceil(s/2) <= i <= min(s, n, m)``
    and uses the symmetrized contraction ``f *~_i^{s-i} g``.
    """
    n, m = f.order, g.order
    phi = product_coefficient(p)
    out = {}
    for s in range(2 * min(n, m) + 1):
        acc = SymmetricKernel(n + m - s)
        for i in range((s + 1) // 2, min(s, n, m) + 1):
            coef = (
                math.factorial(i)
                * math.comb(n, i)
                * math.comb(m, i)
                * math.comb(i, s - i)
                * phi ** (2 * i - s)
            )
            if coef == 0.0:
                continue
            acc = acc + contract(f, g, i, s - i).symmetrize().scaled(coef)
        out[s] = acc
    return out


def r_quantity(F: ChaosSum, p: float) -> float:
    """Weighted contraction-norm sum controlling the Kolmogorov bound of ``F``."""
    pq = p * (1.0 - p)
    n = F.max_order
    total = 0.0
    for i in range(1, n + 1):
        fi = F.kernel(i)
        if not fi.entries:
            continue
        for l in range(i):
            total += pq ** (l - i) * contraction_norm_sq(fi, fi, i, l)
        for l in range(1, i):
            fl = F.kernel(l)
            total += contraction_norm_sq(fl, fi, l, l)
            total += contraction_norm_sq(fi, fi, l, l)
    return total


@dataclass(frozen=True)
class BoundParts:
    """The two ingredients of the chaos-sum bound; the constant is unknown."""

    variance_gap: float
    sqrt_r: float

    @property
    def total(self) -> float:
        return self.variance_gap + self.sqrt_r


def chaos_kolmogorov_bound(F: ChaosSum, p: float) -> BoundParts:
    return BoundParts(abs(1.0 - F.variance()), math.sqrt(r_quantity(F, p)))


# -- text dump ---------------------------------------------------------------


def dump_kernels(F: ChaosSum) -> str:
    """One line per sorted tuple: ``k i1 ... ik value`` with 17 significant digits."""
    lines = [f"0 {F.constant:.17g}"]
    for n, f in F.kernels.items():
        for t in sorted(f.entries):
            idx = " ".join(str(i) for i in t)
            lines.append(f"{n} {idx} {f.entries[t]:.17g}")
    return "\n".join(lines) + "\n"


def load_kernels(text: str | Iterable[str]) -> ChaosSum:
    lines = text.splitlines() if isinstance(text, str) else text
    constant = 0.0
    by_order: Dict[int, Dict[Index, float]] = defaultdict(dict)
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        n = int(parts[0])
        if len(parts) != n + 2:
            raise ValueError(f"malformed kernel line: {line!r}")
        value = float(parts[-1])
        if n == 0:
            constant += value
        else:
            by_order[n][tuple(int(i) for i in parts[1:-1])] = value
    return ChaosSum(constant, {n: SymmetricKernel(n, e) for n, e in by_order.items()})
