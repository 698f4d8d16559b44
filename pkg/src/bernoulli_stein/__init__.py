"""Discrete Malliavin-Stein calculus for Bernoulli sequences.

Exact operators on the finite space ``{-1, +1}^m``, kernel algebra for
discrete multiple integrals, Kolmogorov-distance bounds for subgraph counts in
``G(n, p)`` and a Monte Carlo harness for checking their rates.
"""
from .counting import Adjacency, count_copies, sample_gnp
from .counts import (
    copy_count,
    count_functional,
    mean_count,
    subgraph_count_kernels,
    variance_exact,
)
from .distance import exact_kolmogorov_to_normal, kolmogorov_from_atoms
from .graphs import (
    ComplementPowerRule,
    GraphFormatError,
    GraphSpec,
    IsolatedVertexError,
    PowerRule,
    asymptotic_normality_check,
    closed_form_bound,
    kolmogorov_bound_graph,
    parse_graph,
    predicted_slope,
    read_graph,
    subgraph_profile,
    variance_asymptotic,
)
from .kernels import (
    ChaosSum,
    SymmetricKernel,
    contract,
    dump_kernels,
    load_kernels,
    multiply_chaos,
    r_quantity,
    chaos_kolmogorov_bound,
)
from .montecarlo import (
    SampleConfig,
    empirical_dK,
    scaling_study,
    simulate_counts,
    standardize_counts,
)
from .space import (
    DiscreteGradient,
    Functional,
    OutcomeSpace,
    SimpleProcess,
    chaos_project,
    divergence,
    eval_chaos_sum,
    eval_multiple_integral,
    expect,
    finite_difference,
    ou_apply,
    ou_inverse,
    semigroup,
    variance,
)
from .stein import kolmogorov_stein_bound

__version__ = "0.1.0"
