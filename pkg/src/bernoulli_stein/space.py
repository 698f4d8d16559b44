"""Exact random functionals on a finite Bernoulli space.

An outcome of ``{-1, +1}^m`` is stored as an integer bitmask: bit ``k`` is set
exactly when ``X_k = +1``.  A :class:`Functional` is the table of its values
over all ``2**m`` outcomes, so every expectation below is an exact weighted sum.

The chaos coefficients used throughout are ``c[S] = E[F * prod_{i in S} Y_i]``
indexed by subset bitmask ``S``; the order-``n`` kernel of ``F`` is
``f_n(S) = c[S] / n!``.  Both directions of that change of basis are computed
with an ``O(m 2^m)`` butterfly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import ChaosSum, SymmetricKernel

MAX_COORDINATES = 24


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OutcomeSpace:
    """The product space ``{-1, +1}^m`` with ``P(X_k = +1) = p``."""

    m: int
    p: float
    max_m: int = field(default=MAX_COORDINATES, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.m <= self.max_m:
            raise ValueError(f"m must lie in [1, {self.max_m}], got {self.m}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def size(self) -> int:
        return 1 << self.m

    @property
    def sqrt_pq(self) -> float:
        return math.sqrt(self.p * self.q)

    def outcomes(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def popcounts(self) -> np.ndarray:
        return np.bitwise_count(self.outcomes()).astype(np.int64)

    def probabilities(self) -> np.ndarray:
        ones = self.popcounts()
        # exponentiate in log space so that m = 24 does not lose digits
        logp = ones * math.log(self.p) + (self.m - ones) * math.log(self.q)
        return np.exp(logp)

    def coordinate(self, k: int) -> "Functional":
        """The raw sign variable ``X_k``."""
        self._check_index(k)
        bits = (self.outcomes() >> k) & 1
        return Functional(self, 2.0 * bits - 1.0)

    def constant(self, c: float) -> "Functional":
        return Functional(self, np.full(self.size, float(c)))

    def _check_index(self, k):
        if not 0 <= k < self.m:
            raise IndexError(f"coordinate {k} out of range for m={self.m}")


class Functional:
    """Real values ``F(omega)`` for every outcome of ``space``.

    Supports pointwise arithmetic with scalars and other functionals on the
    same space.  The value table is read-only.
    """

    __slots__ = ("space", "values")

    def __init__(self, space: OutcomeSpace, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (space.size,):
            raise ValueError(
                f"expected {space.size} values for m={space.m}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("functional values must be finite")
        self.space = space
        self.values = _freeze(values)

    def __repr__(self):
        return f"Functional(m={self.space.m}, p={self.space.p})"

    def _coerce(self, other):
        if isinstance(other, Functional):
            if other.space != self.space:
                raise ValueError("functionals live on different spaces")
            return other.values
        return other

    def __add__(self, other):
        return Functional(self.space, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Functional(self.space, self.values - self._coerce(other))

    def __rsub__(self, other):
        return Functional(self.space, self._coerce(other) - self.values)

    def __mul__(self, other):
        return Functional(self.space, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Functional(self.space, self.values / self._coerce(other))

    def __neg__(self):
        return Functional(self.space, -self.values)

    def __abs__(self):
        return Functional(self.space, np.abs(self.values))

    def __pow__(self, k):
        return Functional(self.space, self.values**k)

    def flip(self, k: int) -> "Functional":
        """``F`` composed with the map that negates coordinate ``k``."""
        self.space._check_index(k)
        return Functional(self.space, self.values[self.space.outcomes() ^ (1 << k)])


def expect(F: Functional) -> float:
    return float(np.dot(F.space.probabilities(), F.values))


def variance(F: Functional) -> float:
    mu = expect(F)
    return expect((F - mu) ** 2)


def y_variable(space: OutcomeSpace, k: int) -> Functional:
    """Centered, normalized coordinate ``(q - p + X_k) / (2 sqrt(pq))``."""
    X = space.coordinate(k)
    return (space.q - space.p + X) / (2.0 * space.sqrt_pq)


# -- chaos basis -------------------------------------------------------------


def chaos_coefficients(F: Functional) -> np.ndarray:
    """Return ``c[S] = E[F prod_{i in S} Y_i]`` for every subset bitmask ``S``."""
    sp = F.space
    p, q, s = sp.p, sp.q, sp.sqrt_pq
    c = np.array(F.values, dtype=np.float64)
    for k in range(sp.m):
        view = c.reshape(-1, 2, 1 << k)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = q * lo + p * hi
        view[:, 1, :] = s * (hi - lo)
    return c


def from_chaos_coefficients(space: OutcomeSpace, coeffs) -> Functional:
    """Inverse of :func:`chaos_coefficients`."""
    c = np.array(coeffs, dtype=np.float64)
    if c.shape != (space.size,):
        raise ValueError("coefficient array does not match the space")
    y_minus = -math.sqrt(space.p / space.q)
    y_plus = math.sqrt(space.q / space.p)
    for k in range(space.m):
        view = c.reshape(-1, 2, 1 << k)
        c0 = view[:, 0, :].copy()
        c1 = view[:, 1, :].copy()
        view[:, 0, :] = c0 + y_minus * c1
        view[:, 1, :] = c0 + y_plus * c1
    return Functional(space, c)


def _subset_orders(space):
    return space.popcounts()


def _mask(t):
    m = 0
    for i in t:
        m |= 1 << i
    return m


def _bits(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def kernel_coefficients(space: OutcomeSpace, f: SymmetricKernel, out=None) -> np.ndarray:
    """Scatter ``n! f(t)`` into a chaos-coefficient array."""
    c = np.zeros(space.size) if out is None else out
    nf = math.factorial(f.order)
    for t, v in f.entries.items():
        if t and t[-1] >= space.m:
            raise IndexError(f"kernel index {t[-1]} out of range for m={space.m}")
        c[_mask(t)] += nf * v
    return c


def eval_multiple_integral(space: OutcomeSpace, f: SymmetricKernel) -> Functional:
    """``I_n(f)`` as a functional; order 0 kernels evaluate to their constant."""
    return from_chaos_coefficients(space, kernel_coefficients(space, f))


def eval_chaos_sum(space: OutcomeSpace, F: ChaosSum) -> Functional:
    c = np.zeros(space.size)
    c[0] = F.constant
    for f in F.kernels.values():
        kernel_coefficients(space, f, out=c)
    return from_chaos_coefficients(space, c)


def chaos_project(F: Functional, tol: float = 0.0) -> ChaosSum:
    """Chaos decomposition ``F = sum_n I_n(f_n)``.

    Coefficients with ``|c[S]| <= tol`` are dropped from the sparse kernels.
    """
    sp = F.space
    c = chaos_coefficients(F)
    orders = _subset_orders(sp)
    kernels = {}
    for n in range(1, sp.m + 1):
        idx = np.flatnonzero((orders == n) & (np.abs(c) > tol))
        if idx.size == 0:
            continue
        nf = math.factorial(n)
        entries = {_bits(int(S)): float(c[S]) / nf for S in idx}
        kernels[n] = SymmetricKernel(n, entries)
    return ChaosSum(float(c[0]), kernels)


# -- operators ---------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteGradient:
    """``DF`` stored as an ``(m, 2^m)`` array; row ``k`` is ``D_k F``."""

    space: OutcomeSpace
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _freeze(self.rows))

    def __getitem__(self, k) -> Functional:
        return Functional(self.space, self.rows[k])

    def inner(self, other) -> Functional:
        """Pointwise ``<self, other>`` over the coordinate index."""
        return Functional(self.space, np.einsum("kw,kw->w", self.rows, other.rows))

    def norm_sq(self) -> Functional:
        return self.inner(self)


@dataclass(frozen=True)
class SimpleProcess:
    """A process ``u = (u_0, ..., u_{m-1})`` of functionals on one space."""

    space: OutcomeSpace
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.shape != (self.space.m, self.space.size):
            raise ValueError("process rows must have shape (m, 2^m)")
        object.__setattr__(self, "rows", _freeze(rows))

    @classmethod
    def from_functionals(cls, rows):
        rows = list(rows)
        space = rows[0].space
        if any(r.space != space for r in rows):
            raise ValueError("all rows must share the same space")
        return cls(space, np.stack([r.values for r in rows]))

    def __getitem__(self, k) -> Functional:
        return Functional(self.space, self.rows[k])

    def norm_sq(self) -> Functional:
        return Functional(self.space, np.einsum("kw,kw->w", self.rows, self.rows))


def finite_difference(F: Functional) -> DiscreteGradient:
    """``D_k F = sqrt(pq) (F(omega_+^k) - F(omega_-^k))`` for each ``k``."""
    sp = F.space
    w = sp.outcomes()
    rows = np.empty((sp.m, sp.size))
    for k in range(sp.m):
        bit = 1 << k
        rows[k] = sp.sqrt_pq * (F.values[w | bit] - F.values[w & ~bit])
    return DiscreteGradient(sp, rows)


def _scale_by_order(F: Functional, weights_of_order) -> Functional:
    sp = F.space
    c = chaos_coefficients(F)
    c *= weights_of_order(_subset_orders(sp))
    return from_chaos_coefficients(sp, c)


def ou_apply(F: Functional) -> Functional:
    """Ornstein-Uhlenbeck generator: multiplies the order-``n`` chaos by ``-n``."""
    return _scale_by_order(F, lambda n: -n.astype(float))


def ou_inverse(F: Functional) -> Functional:
    """Pseudo-inverse of :func:`ou_apply`; the mean of ``F`` is discarded."""

    def w(n):
        out = np.zeros(n.shape)
        nz = n > 0
        out[nz] = -1.0 / n[nz]
        return out

    return _scale_by_order(F, w)


def semigroup(F: Functional, t: float) -> Functional:
    """``P_t F = sum_n exp(-n t) I_n(f_n)``."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return _scale_by_order(F, lambda n: np.exp(-t * n))


def divergence(u: SimpleProcess) -> Functional:
    """Adjoint of ``D``: the unique ``delta(u)`` with ``E[<DF,u>] = E[F delta(u)]``.

    In the chaos basis ``D_k`` maps ``Psi_S`` to ``Psi_{S - k}`` when ``k in S``,
    so the representer has coefficients ``sum_{k in S} c_{u_k}[S - {k}]``.
    """
    sp = u.space
    w = sp.outcomes()
    out = np.zeros(sp.size)
    for k in range(sp.m):
        ck = chaos_coefficients(u[k])
        bit = 1 << k
        has_k = (w & bit) != 0
        out[has_k] += ck[w[has_k] ^ bit]
    return from_chaos_coefficients(sp, out)


def kernel_process(space: OutcomeSpace, n: int, entries) -> SimpleProcess:
    """Process ``u_k = I_n(f(*, k))`` from entries ``{(t, k): value}``.

    ``t`` is an ``n``-tuple of distinct indices; ``k`` may or may not occur in it.
    """
    per_k = [dict() for _ in range(space.m)]
    for (t, k), v in entries.items():
        space._check_index(k)
        key = tuple(sorted(t))
        per_k[k][key] = per_k[k].get(key, 0.0) + v
    return SimpleProcess.from_functionals(
        eval_multiple_integral(space, SymmetricKernel(n, e)) for e in per_k
    )


def divergence_kernel(space: OutcomeSpace, n: int, entries) -> Functional:
    """``delta(u) = I_{n+1}(f~)`` for ``u = kernel_process(space, n, entries)``.

    ``f~`` averages ``f(k_1..k_{i-1}, k_{i+1}..k_{n+1}, k_i)`` over ``i``; tuples
    where ``k`` repeats an index of ``t`` only reach the diagonal and vanish.
    """
    sym = {}
    for (t, k), v in entries.items():
        if k in t:
            continue
        T = tuple(sorted(tuple(t) + (k,)))
        sym[T] = sym.get(T, 0.0) + v / (n + 1)
    return eval_multiple_integral(space, SymmetricKernel(n + 1, sym))
