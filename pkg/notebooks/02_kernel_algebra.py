"""
Sparse symmetric kernels
========================

Multiple integrals are indexed by symmetric kernels that vanish on
diagonals.  Products of integrals expand through contractions, and a
weighted sum of contraction norms controls the distance to the normal law.
"""
# %%
import math

import numpy as np

from bernoulli_stein.kernels import (
    ChaosSum, SymmetricKernel, contract, multiply_chaos, r_quantity, chaos_kolmogorov_bound,
)
from bernoulli_stein.space import OutcomeSpace, eval_multiple_integral

f = SymmetricKernel(2, {(0, 1): 1.0, (1, 2): -0.5, (2, 3): 0.25})
g = SymmetricKernel(2, {(0, 2): 0.7, (1, 3): 0.3})

# %% A contraction keeps one shared argument free and sums over none
c = contract(f, g, k=1, l=0)
print("arity", c.arity, "norm^2", c.norm_sq())
print("after symmetrization", c.symmetrize().norm_sq())

# %% Product formula checked on every outcome of a 6-coordinate space
p = 0.3
sp = OutcomeSpace(6, p)
lhs = eval_multiple_integral(sp, f) * eval_multiple_integral(sp, g)
rhs = sum(eval_multiple_integral(sp, h).values for h in multiply_chaos(f, g, p).values())
print("max pointwise error", np.max(np.abs(lhs.values - rhs)))

# %% R_F for normalized sums of first-order integrals shrinks like m^{-1}
for m in (4, 16, 64):
    F = ChaosSum(0.0, {1: SymmetricKernel(1, {(k,): 1 / math.sqrt(m) for k in range(m)})})
    parts = chaos_kolmogorov_bound(F, p)
    print(f"m={m:3d}  R_F={r_quantity(F, p):.4f}  |1-Var|={parts.variance_gap:.1e}  sqrt(R_F)={parts.sqrt_r:.4f}")
