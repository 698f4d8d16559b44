"""
Monte Carlo decay of the Kolmogorov distance
============================================

Simulate triangle counts along p = c n^-alpha and compare the fitted
log-log slope of the empirical distance with the exponent of the bound.
Only the exponents are comparable because the constants are unknown.  The
acceptance suite uses 20 000 replications; 4 000 keep this script short.
At that size the DKW radius is about 0.02, so once dK_hat drops to that
level the sampling noise dominates and the fitted slope flattens.  This is
most visible in the dense case, where the distance is small from the start.
"""
# %%
from bernoulli_stein.graphs import triangle
from bernoulli_stein.montecarlo import scaling_study

for alpha, c, ns in [(0.0, 0.5, [16, 32, 64, 128]), (0.7, 1.0, [32, 64, 128, 256])]:
    study = scaling_study(triangle(), alpha, ns, c=c, reps=4_000, seed=11)
    print(f"alpha={alpha}")
    for pt in study.points:
        print(f"  n={pt.n:4d} p={pt.p:.4f}  dK_hat={pt.dk_hat:.4f}  (DKW radius {pt.dkw_radius:.4f})")
    print(f"  fitted slope {study.fitted_slope:+.3f}, predicted {study.predicted_slope:+.3f}")
    floor = sum(pt.dk_hat < 2 * pt.dkw_radius for pt in study.points)
    print(f"  {floor} of {len(study.points)} points within twice the DKW radius")
