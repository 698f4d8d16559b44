"""Command-line entry point.

Subcommands: ``bound``, ``simulate``, ``scaling``, ``verify``, ``decompose``.

Exit codes: 0 success, 1 a verification failed, 2 bad flags or malformed
graph, 3 isolated vertex in the template, 4 I/O failure, 5 enumeration cap
exceeded.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import List, Optional

import numpy as np

from . import verify as _verify
from .counts import BudgetExceeded, count_functional, subgraph_count_kernels
from .graphs import (
    FAMILIES,
    GraphFormatError,
    IsolatedVertexError,
    PowerRule,
    ProfileTooLarge,
    asymptotic_normality_check,
    closed_form_bound,
    family_graph,
    kolmogorov_bound_graph,
    predicted_slope,
    read_graph,
    subgraph_profile,
)
from .kernels import dump_kernels
from .montecarlo import (
    NonNormalRegime,
    SampleConfig,
    empirical_dK,
    scaling_study,
    simulate_counts,
    standardize_counts,
    write_plot_script,
    write_scaling_csv,
    write_simulation_csv,
)
from .space import MAX_COORDINATES, eval_chaos_sum, expect, variance

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_ISOLATED, EXIT_IO, EXIT_CAP = 0, 1, 2, 3, 4, 5
DEFAULT_MAX_M = 22


class UsageError(Exception):
    pass


def _n_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n-list expects comma-separated integers, got {text!r}")


def _graph_flags(sp):
    sp.add_argument("--graph", help="graph file: 'v e' then e lines 'u w' (0-based)")
    sp.add_argument("--family", choices=FAMILIES, help="use a closed-form family instead of --graph")
    sp.add_argument("--size", type=int, help="family size: vertices for cycle/complete, edges for tree")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bernoulli-stein", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="Kolmogorov bound for a subgraph count", allow_abbrev=False)
    _graph_flags(b)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--alpha", type=float, help="judge normality along p = c n^-alpha through (n, p)")
    b.add_argument("--approx", action="store_true", help="greedy profile for graphs beyond 24 vertices")

    s = sub.add_parser("simulate", help="Monte Carlo counts and empirical d_K", allow_abbrev=False)
    _graph_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--reps", type=int, default=20_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out", help="CSV path for per-replication counts")
    s.add_argument("--plot", action="store_true", help="also write a plot script next to --out")

    c = sub.add_parser("scaling", help="d_K decay along p = c n^-alpha", allow_abbrev=False)
    _graph_flags(c)
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--n-list", type=_n_list, required=True, help="comma-separated increasing n values")
    c.add_argument("--p", type=float, default=1.0, help="prefactor c in p = c n^-alpha")
    c.add_argument("--reps", type=int, default=20_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    c.add_argument("--out", help="CSV path for the scaling table")
    c.add_argument("--plot", action="store_true")

    v = sub.add_parser("verify", help="randomized identity and inequality checks", allow_abbrev=False)
    v.add_argument("suite", choices=("core", "kernels", "graph"))
    v.add_argument("--n", type=int, default=10, help="number of Bernoulli coordinates m (core suite)")
    v.add_argument("--p", type=float, default=0.3)
    v.add_argument("--reps", type=int, default=200, help="random trials per check")
    v.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("decompose", help="chaos kernels of a standardized count", allow_abbrev=False)
    _graph_flags(d)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--p", type=float, required=True)
    d.add_argument("--max-m", type=int, default=DEFAULT_MAX_M, help="cap on C(n,2) for full enumeration")
    return parser


def _load_graph(args):
    if args.graph and args.family:
        raise UsageError("give either --graph or --family, not both")
    if args.family:
        if args.size is None:
            raise UsageError("--family needs --size")
        return family_graph(args.family, args.size)
    if not args.graph:
        raise UsageError("one of --graph or --family is required")
    return read_graph(args.graph)


def _check_p(p):
    if not (0.0 < p < 1.0):
        raise UsageError(f"--p must lie in (0, 1), got {p}")


def _fmt(x) -> str:
    # shortest string that round-trips, independent of locale
    return repr(float(x))


def _check_out(args):
    if args.plot and not args.out:
        raise UsageError("--plot needs --out")
    if args.out:
        parent = os.path.dirname(os.path.abspath(args.out))
        if not os.path.isdir(parent):
            raise FileNotFoundError(f"output directory {parent} does not exist")


# -- commands ----------------------------------------------------------------


def run_bound(args, out) -> int:
    G = _load_graph(args)
    _check_p(args.p)
    if args.n < G.v:
        raise UsageError(f"--n must be at least v_G = {G.v}")
    profile = subgraph_profile(G, approx=args.approx)
    rep = kolmogorov_bound_graph(G, args.n, args.p, profile)
    if args.alpha is not None:
        alpha = args.alpha
    else:
        # the point sits on p = n^-alpha for this alpha
        alpha = -math.log(args.p) / math.log(args.n)
    rule = PowerRule(alpha, args.p * args.n**alpha)
    verdict = asymptotic_normality_check(G, [args.n, 2 * args.n], rule, profile)
    lines = [
        f"graph v={G.v} e={G.e}",
        f"n {args.n}",
        f"p {_fmt(args.p)}",
        f"profile {' '.join(f'{e}:{v}' for e, v in profile.items())}" + ("" if profile.exact else " (greedy)"),
        f"beta {rep.beta}",
        f"minimizer v_H={rep.minimizer[0]} e_H={rep.minimizer[1]}",
        f"regime {rep.regime}",
        f"log_min_term {_fmt(rep.log_min_term)}",
        f"log_bound {_fmt(rep.log_bound)}",
        f"bound {_fmt(rep.bound)}",
        f"variance_asymptotic {_fmt(rep.variance_asymptotic)}",
        f"alpha {_fmt(alpha)}",
        f"predicted_slope {_fmt(predicted_slope(G, alpha, profile))}",
        f"normal {'yes' if verdict.normal else 'no'} ({verdict.reason})",
    ]
    if args.family:
        cf = closed_form_bound(args.family, args.size, args.n, args.p)
        lines.append(f"closed_form_regime {cf.regime}")
        lines.append(f"closed_form_log_bound {_fmt(cf.log_bound)}")
    print("\n".join(lines), file=out)
    return EXIT_OK


def _plot(args, csv_path, x, ys):
    if args.plot:
        write_plot_script(os.path.splitext(csv_path)[0] + ".plot", csv_path, x, ys)


def run_simulate(args, out) -> int:
    G = _load_graph(args)
    _check_p(args.p)
    _check_out(args)
    cfg = SampleConfig(args.n, args.p, args.reps, args.seed)
    counts = simulate_counts(G, cfg, args.threads)
    z = standardize_counts(counts, G, args.n, args.p)
    print(f"reps {cfg.reps}", file=out)
    print(f"mean_count {_fmt(counts.mean())}", file=out)
    print("moments exact-moments", file=out)
    if cfg.reps >= 100:
        ed = empirical_dK(z)
        print(f"dk_hat {_fmt(ed.dk_hat)}", file=out)
        print(f"dkw_radius {_fmt(ed.dkw_radius)}", file=out)
    if args.out:
        write_simulation_csv(args.out, counts, z)
        _plot(args, args.out, "rep", ["standardized"])
    return EXIT_OK


def run_scaling(args, out) -> int:
    G = _load_graph(args)
    if not args.p > 0:
        raise UsageError("--p (the prefactor c) must be positive")
    _check_out(args)
    study = scaling_study(G, args.alpha, args.n_list, c=args.p, reps=args.reps, seed=args.seed,
                          threads=args.threads)
    print("n p dk_hat dkw_radius log_bound", file=out)
    for pt in study.points:
        print(f"{pt.n} {_fmt(pt.p)} {_fmt(pt.dk_hat)} {_fmt(pt.dkw_radius)} {_fmt(pt.log_bound)}", file=out)
    print(f"fitted_slope {_fmt(study.fitted_slope)}", file=out)
    print(f"predicted_slope {_fmt(study.predicted_slope)}", file=out)
    print(f"bound_slope {_fmt(study.bound_slope)}", file=out)
    print("note: only exponents are comparable; the constants in the bound are unknown", file=out)
    if args.out:
        write_scaling_csv(args.out, study)
        _plot(args, args.out, "n", ["dk_hat"])
    return EXIT_OK


def run_verify(args, out) -> int:
    if not 1 <= args.n <= MAX_COORDINATES:
        raise UsageError(f"--n (coordinates) must lie in 1..{MAX_COORDINATES}")
    _check_p(args.p)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    if args.suite == "core":
        results = _verify.run_core([args.n], [args.p], args.reps, args.seed)
    elif args.suite == "kernels":
        results = _verify.run_kernels(args.reps, args.seed, ps=(args.p,))
    else:
        results = _verify.run_graph(seed=args.seed)
    for r in results:
        print(r.line(), file=out)
    ok = all(r.passed for r in results)
    print(f"{args.suite}: {'all passed' if ok else 'FAILURES'}", file=out)
    return EXIT_OK if ok else EXIT_VERIFY


def run_decompose(args, out) -> int:
    G = _load_graph(args)
    _check_p(args.p)
    if args.n < G.v:
        raise UsageError(f"--n must be at least v_G = {G.v}")
    if args.max_m > MAX_COORDINATES:
        raise UsageError(f"--max-m cannot exceed {MAX_COORDINATES}")
    m = args.n * (args.n - 1) // 2
    if m > args.max_m:
        raise BudgetExceeded(f"2^{m} outcomes exceed the cap 2^{args.max_m}")
    F = subgraph_count_kernels(G, args.n, args.p)
    out.write(dump_kernels(F))
    N = count_functional(G, args.n, args.p, max_m=args.max_m)
    target = (N - expect(N)) / math.sqrt(variance(N))
    residual = float(np.max(np.abs(eval_chaos_sum(N.space, F).values - target.values)))
    print(f"residual {residual:.3e}", file=out)
    return EXIT_OK


COMMANDS = {
    "bound": run_bound,
    "simulate": run_simulate,
    "scaling": run_scaling,
    "verify": run_verify,
    "decompose": run_decompose,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    err = sys.stderr
    try:
        return COMMANDS[args.command](args, sys.stdout)
    except IsolatedVertexError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ISOLATED
    except (BudgetExceeded, ProfileTooLarge) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CAP
    except (GraphFormatError, UsageError, NonNormalRegime, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
