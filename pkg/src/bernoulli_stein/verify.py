"""Randomized checks of the exact identities and inequalities.

Each check draws random instances, measures a residual between two routes
that share no code path beyond the basic data types, and reports the worst
residual and the number of failures.  ``core``, ``kernels`` and ``graph`` group
the checks the same way the CLI ``verify`` command does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, List, Sequence

import numpy as np

from . import counts, graphs
from .distance import exact_kolmogorov_to_normal
from .kernels import (
    ChaosSum,
    SymmetricKernel,
    contract,
    contraction_norm_sq,
    multiply_chaos,
)
from .space import (
    Functional,
    OutcomeSpace,
    SimpleProcess,
    chaos_project,
    divergence,
    divergence_kernel,
    eval_chaos_sum,
    eval_multiple_integral,
    expect,
    finite_difference,
    kernel_process,
    ou_apply,
    ou_inverse,
    variance,
)
from .stein import kolmogorov_stein_bound

TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    trials: int = 0
    failures: int = 0
    max_residual: float = 0.0

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.failures == 0

    def record(self, residual: float, ok: bool | None = None, tol: float = TOL):
        self.trials += 1
        residual = float(residual)
        self.max_residual = max(self.max_residual, residual)
        if ok is None:
            ok = residual < tol
        if not ok:
            self.failures += 1

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: {self.trials - self.failures}/{self.trials} ok, "
            f"max residual {self.max_residual:.3e}"
        )


# -- random instances --------------------------------------------------------


def random_kernel(rng, order: int, size: int, nnz: int = 8) -> SymmetricKernel:
    tuples = list(combinations(range(size), order))
    pick = rng.choice(len(tuples), size=min(nnz, len(tuples)), replace=False)
    return SymmetricKernel(order, {tuples[i]: rng.uniform(-1, 1) for i in pick})


def random_functional(space: OutcomeSpace, rng) -> Functional:
    return Functional(space, rng.normal(size=space.size))


def random_chaos_sum(rng, m: int, max_order: int = 3, nnz: int = 6) -> ChaosSum:
    orders = [n for n in range(1, max_order + 1) if rng.random() < 0.7] or [1]
    return ChaosSum(0.0, {n: random_kernel(rng, n, m, nnz) for n in orders})


def random_process(space: OutcomeSpace, rng) -> SimpleProcess:
    return SimpleProcess(space, rng.normal(size=(space.m, space.size)))


def _grid(ms, ps, trials):
    for t in range(trials):
        yield t, ms[t % len(ms)], ps[(t // len(ms)) % len(ps)]


def _sup(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# -- core --------------------------------------------------------------------


def check_isometry(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("isometry E[I_n I_m] = 1{n=m} n! <f,g>")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        n1, n2 = rng.integers(1, 5, size=2)
        f, g = random_kernel(rng, n1, m), random_kernel(rng, n2, m)
        lhs = expect(eval_multiple_integral(sp, f) * eval_multiple_integral(sp, g))
        rhs = math.factorial(n1) * f.inner(g) if n1 == n2 else 0.0
        res.record(abs(lhs - rhs))
    return res


def check_gradient_of_chaos(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("D_k I_n(f) = n I_{n-1}(f(*,k))")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        n = int(rng.integers(1, 5))
        f = random_kernel(rng, n, m)
        D = finite_difference(eval_multiple_integral(sp, f))
        worst = 0.0
        for k in range(m):
            rhs = n * eval_multiple_integral(sp, f.section(k)).values
            worst = max(worst, _sup(D.rows[k], rhs))
        res.record(worst)
    return res


def check_product_rule(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("product rule D_k(FG)")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F, G = random_functional(sp, rng), random_functional(sp, rng)
        DF, DG, DFG = finite_difference(F), finite_difference(G), finite_difference(F * G)
        worst = 0.0
        for k in range(m):
            X = sp.coordinate(k).values
            rhs = F.values * DG.rows[k] + G.values * DF.rows[k] - X / sp.sqrt_pq * DF.rows[k] * DG.rows[k]
            worst = max(worst, _sup(DFG.rows[k], rhs))
        res.record(worst)
    return res


def check_covariance_identity(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("Cov(F,G) = E[<DG, -DL^{-1}F>]")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F, G = random_functional(sp, rng), random_functional(sp, rng)
        cov = expect(F * G) - expect(F) * expect(G)
        rhs = -expect(finite_difference(G).inner(finite_difference(ou_inverse(F))))
        res.record(abs(cov - rhs))
    return res


def check_duality(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("duality E[<DF,u>] = E[F delta(u)]")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F, u = random_functional(sp, rng), random_process(sp, rng)
        lhs = expect(finite_difference(F).inner(u))
        rhs = expect(F * divergence(u))
        res.record(abs(lhs - rhs))
    return res


def check_divergence_routes(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("delta: duality solve = kernel symmetrization")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        n = int(rng.integers(0, 4))
        entries = {}
        for _ in range(8):
            t = tuple(sorted(rng.choice(m, size=n, replace=False).tolist()))
            entries[(t, int(rng.integers(m)))] = rng.uniform(-1, 1)
        u = kernel_process(sp, n, entries)
        res.record(_sup(divergence(u).values, divergence_kernel(sp, n, entries).values))
    return res


def check_chaos_round_trip(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("chaos round trip")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F = random_functional(sp, rng)
        res.record(_sup(eval_chaos_sum(sp, chaos_project(F)).values, F.values))
    return res


def check_ou_inverse(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("L L^{-1} F = F - E[F]")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F = random_functional(sp, rng)
        res.record(_sup(ou_apply(ou_inverse(F)).values, (F - expect(F)).values))
    return res


def check_energy_bound(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("E||DL^{-1}F||^2 <= Var F")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F = random_functional(sp, rng)
        gap = expect(finite_difference(ou_inverse(F)).norm_sq()) - variance(F)
        res.record(max(gap, 0.0), ok=gap <= 1e-12)
    return res


def _process_gradients(u: SimpleProcess):
    # grads[l, k] = D_k u_l
    return np.stack([finite_difference(u[l]).rows for l in range(u.space.m)])


def check_skorokhod(rng, ms, ps, trials) -> CheckResult:
    """Both the isometry identity and the dropped-diagonal bound."""
    res = CheckResult("Skorokhod isometry and bound")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        u = random_process(sp, rng)
        P = sp.probabilities()
        lhs = expect(divergence(u) ** 2)
        grads = _process_gradients(u)
        cross = np.einsum("lkw,klw->w", grads, grads)
        diag = np.einsum("kkw->w", grads**2)
        norm = float(u.norm_sq().values @ P)
        off = float((cross - diag) @ P)
        identity = lhs - (norm + off - float(diag @ P))
        bound_gap = lhs - (norm + off)
        res.record(max(abs(identity), max(bound_gap, 0.0)), ok=abs(identity) < TOL and bound_gap <= TOL)
    return res


def check_mehler(rng, ms, ps, trials, alphas=(1, 2, 4)) -> CheckResult:
    res = CheckResult("E|D_k L^{-1}F|^a <= E|D_k F|^a, a in {1,2,4}")
    for _, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F = random_functional(sp, rng)
        P = sp.probabilities()
        DF = np.abs(finite_difference(F).rows)
        DL = np.abs(finite_difference(ou_inverse(F)).rows)
        worst = -math.inf
        for a in alphas:
            worst = max(worst, float(np.max((DL**a) @ P - (DF**a) @ P)))
        res.record(max(worst, 0.0), ok=worst <= 1e-12)
    return res


def check_kolmogorov_bound(rng, ms, ps, trials) -> CheckResult:
    res = CheckResult("exact d_K <= four-term Stein bound")
    for t, m, p in _grid(ms, ps, trials):
        sp = OutcomeSpace(m, p)
        F = random_chaos_sum(rng, m)
        if t % 2 == 0:
            F = F.scaled(1.0 / math.sqrt(F.variance()))
        X = eval_chaos_sum(sp, F)
        X = X - expect(X)
        gap = exact_kolmogorov_to_normal(X) - kolmogorov_stein_bound(X).total
        res.record(max(gap, 0.0), ok=gap <= 1e-12)
    return res


CORE_CHECKS: List[Callable] = [
    check_isometry,
    check_gradient_of_chaos,
    check_product_rule,
    check_covariance_identity,
    check_duality,
    check_divergence_routes,
    check_chaos_round_trip,
    check_ou_inverse,
    check_energy_bound,
    check_skorokhod,
    check_mehler,
    check_kolmogorov_bound,
]


# -- kernels -----------------------------------------------------------------


def _random_pair(rng, size=8, max_order=4):
    n, m = rng.integers(1, max_order + 1, size=2)
    return random_kernel(rng, int(n), size, 10), random_kernel(rng, int(m), size, 10)


def check_contraction_norm_strict(rng, trials) -> CheckResult:
    """``||f *_k^l g||^2`` against the one-sided contractions, ``l < k``."""
    res = CheckResult("contraction norm bound (l < k)")
    for _ in range(trials):
        f, g = _random_pair(rng)
        n, m = f.order, g.order
        worst = -math.inf
        for k in range(1, min(n, m) + 1):
            for l in range(k):
                lhs = contraction_norm_sq(f, g, k, l)
                rhs = 0.5 * contraction_norm_sq(f, f, n, l + n - k) + 0.5 * contraction_norm_sq(g, g, m, l + m - k)
                worst = max(worst, lhs - rhs)
        res.record(max(worst, 0.0), ok=worst <= TOL)
    return res


def check_contraction_norm_equal(rng, trials, literal: bool = False) -> CheckResult:
    """``||f *_k^k g||^2 <= (||f *_{n-k}^{n-k} f||^2 + ||g *_{m-k}^{m-k} g||^2) / 2``.

    The right-hand contractions are taken without the diagonal indicator, as
    in the Cauchy-Schwarz step that proves the bound.  ``literal=True`` keeps
    the indicator there; that version fails already for ``f = g = e_0``.
    """
    name = "contraction norm bound (l = k)" + (" [indicator on right side]" if literal else "")
    res = CheckResult(name)
    for _ in range(trials):
        f, g = _random_pair(rng)
        n, m = f.order, g.order
        worst = -math.inf
        for k in range(0, min(n, m) + 1):
            lhs = contraction_norm_sq(f, g, k, k)
            rhs = 0.5 * contraction_norm_sq(f, f, n - k, n - k, off_diagonal=literal) + 0.5 * contraction_norm_sq(
                g, g, m - k, m - k, off_diagonal=literal
            )
            worst = max(worst, lhs - rhs)
        res.record(max(worst, 0.0), ok=worst <= TOL)
    return res


def check_symmetrization_contracts(rng, trials) -> CheckResult:
    res = CheckResult("||sym(f *_k^l g)|| <= ||f *_k^l g||")
    for _ in range(trials):
        f, g = _random_pair(rng)
        worst = -math.inf
        for k in range(min(f.order, g.order) + 1):
            for l in range(k + 1):
                c = contract(f, g, k, l)
                worst = max(worst, c.symmetrize().norm_sq() - c.norm_sq())
        res.record(max(worst, 0.0), ok=worst <= TOL)
    return res


def check_contraction_symmetry(rng, trials) -> CheckResult:
    res = CheckResult("f *_k^l g = g *_k^l f with z-blocks swapped")
    for _ in range(trials):
        order = int(rng.integers(1, 4))
        f, g = random_kernel(rng, order, 7, 10), random_kernel(rng, order, 7, 10)
        worst = 0.0
        for k in range(order + 1):
            for l in range(k + 1):
                a = contract(f, g, k, l).blocks
                b = contract(g, f, k, l).blocks
                for key in set(a) | set(b):
                    y, z1, z2 = key
                    worst = max(worst, abs(a.get(key, 0.0) - b.get((y, z2, z1), 0.0)))
        res.record(worst)
    return res


def check_multiplication_formula(rng, trials, ps=(0.3, 0.5), size=10, max_total=6) -> CheckResult:
    res = CheckResult("I_n(f) I_m(g) = sum_s I_{n+m-s}(h_s)")
    pairs = [(n, m) for n in range(1, max_total) for m in range(1, max_total - n + 1)]
    for t in range(trials):
        n, m = pairs[t % len(pairs)]
        p = ps[(t // len(pairs)) % len(ps)]
        sp = OutcomeSpace(size, p)
        f, g = random_kernel(rng, n, size), random_kernel(rng, m, size)
        lhs = eval_multiple_integral(sp, f) * eval_multiple_integral(sp, g)
        rhs = np.zeros(sp.size)
        for h in multiply_chaos(f, g, p).values():
            rhs += eval_multiple_integral(sp, h).values
        res.record(_sup(lhs.values, rhs))
    return res


# -- graph -------------------------------------------------------------------


RECONSTRUCTION_GRAPHS = {
    "edge": graphs.edge_graph(),
    "path2": graphs.path_graph(2),
    "star3": graphs.star_graph(3),
    "triangle": graphs.triangle(),
    "path3": graphs.path_graph(3),
}


def check_kernel_reconstruction(graph_names: Sequence[str] = tuple(RECONSTRUCTION_GRAPHS), ps=(0.2, 0.5, 0.7), n_max=5):
    """Reconstruction residual and kernel-isometry variance, against full enumeration."""
    rec = CheckResult("chaos kernels reproduce the standardized count", )
    var = CheckResult("kernel-isometry variance = enumerated variance (relative)")
    for name in graph_names:
        G = RECONSTRUCTION_GRAPHS[name]
        for n in range(G.v, n_max + 1):
            for p in ps:
                N = counts.count_functional(G, n, p)
                mu, v = expect(N), variance(N)
                target = (N - mu) / math.sqrt(v)
                F = counts.subgraph_count_kernels(G, n, p)
                rec.record(_sup(eval_chaos_sum(N.space, F).values, target.values), tol=1e-9)
                var.record(abs(F.variance() * counts.variance_exact(G, n, p) - v) / v, tol=1e-9)
    return [rec, var]


def closed_form_grid(points: int = 200, seed: int = 0):
    """``(n, p)`` pairs covering every regime, exact thresholds included."""
    rng = np.random.default_rng(seed)
    out = []
    for n in (10, 30, 100, 1000, 10**4):
        for r in (3, 4, 5):
            out.append((n, n ** (-(r - 2) / (r - 1))))
            out.append((n, n ** (-2 / (r + 1))))
        out.append((n, 1.0 / n))
    while len(out) < points:
        n = int(10 ** rng.uniform(1, 5))
        p = 10 ** rng.uniform(-math.log10(n) * 1.5, -1e-3)
        out.append((n, min(p, 0.999)))
    return out[:points]


CLOSED_FORM_CASES = (
    [("cycle", r, "cycle") for r in (3, 4, 5)]
    + [("complete", r, "complete") for r in (3, 4)]
    + [("tree", r, shape) for r in (2, 3, 4) for shape in ("path", "star")]
)


def check_closed_forms(points: int = 200, seed: int = 0) -> CheckResult:
    res = CheckResult("closed-form families = general min-branch bound")
    grid = closed_form_grid(points, seed)
    for family, r, shape in CLOSED_FORM_CASES:
        G = graphs.family_graph(family, r, "star" if shape == "star" else "path")
        prof = graphs.subgraph_profile(G)
        for n, p in grid:
            if n < G.v:
                continue
            gen = graphs.kolmogorov_bound_graph(G, n, p, prof)
            cf = graphs.closed_form_bound(family, r, n, p)
            diff = abs(gen.log_bound - cf.log_bound)
            res.record(diff, ok=diff < 1e-12 and gen.regime == cf.regime)
    return res


def check_bound_consistency(grid=None) -> CheckResult:
    res = CheckResult("bound (1-p) n^v p^e / sqrt(var_asym) = 1")
    grid = grid or closed_form_grid(60)
    for G in (graphs.triangle(), graphs.cycle_graph(4), graphs.complete_graph(4), graphs.star_graph(3)):
        prof = graphs.subgraph_profile(G)
        for n, p in grid:
            if n < G.v:
                continue
            r = graphs.kolmogorov_bound_graph(G, n, p, prof)
            log_ratio = (
                r.log_bound + math.log1p(-p) + G.v * math.log(n) + G.e * math.log(p)
                - 0.5 * r.log_variance_asymptotic
            )
            res.record(abs(log_ratio), tol=1e-12)
    return res


def check_profile_monotone() -> CheckResult:
    res = CheckResult("profile nondecreasing; edge deletion never raises vmin")
    templates = [graphs.complete_graph(4), graphs.complete_graph(5), graphs.cycle_graph(5),
                 graphs.triangle(), graphs.star_graph(4), graphs.path_graph(4)]
    for G in templates:
        prof = graphs.subgraph_profile(G).vmin
        ok = all(prof[e] <= prof[e + 1] for e in range(1, G.e)) and prof[1] == 2 and prof[G.e] == G.v
        for edge in G.edges:
            H = G.without_edge(edge)
            sub = graphs.subgraph_profile(H).vmin
            ok &= all(sub[e] >= prof[e] for e in sub)
        res.record(0.0 if ok else 1.0, ok=ok)
    return res


# -- suites ------------------------------------------------------------------


def run_core(m: Sequence[int], p: Sequence[float], trials: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [check(rng, list(m), list(p), trials) for check in CORE_CHECKS]


def run_kernels(trials: int, seed: int = 0, ps=(0.3, 0.5)):
    rng = np.random.default_rng(seed)
    return [
        check_contraction_norm_strict(rng, trials),
        check_contraction_norm_equal(rng, trials),
        check_symmetrization_contracts(rng, trials),
        check_contraction_symmetry(rng, max(1, trials // 4)),
        check_multiplication_formula(rng, max(trials // 4, 15), ps=ps),
    ]


def run_graph(ps=(0.2, 0.5, 0.7), seed: int = 0):
    return check_kernel_reconstruction(ps=ps) + [
        check_closed_forms(seed=seed),
        check_bound_consistency(),
        check_profile_monotone(),
    ]
