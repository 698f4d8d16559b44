"""Kolmogorov distance to the standard normal for discrete laws."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from .space import Functional


def normal_cdf(x):
    """Standard normal CDF (``scipy.special.ndtr``, accurate to ~1e-16)."""
    return ndtr(x)


def kolmogorov_from_atoms(values, weights) -> float:
    """``sup_x |P(Z <= x) - Phi(x)|`` for a law with finitely many atoms.

    The supremum is attained at an atom ``a`` either by ``P(Z <= a)`` or by the
    left limit ``P(Z < a)``, so both are compared against ``Phi(a)``.
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    atoms, inverse = np.unique(values, return_inverse=True)
    mass = np.bincount(inverse.ravel(), weights=weights.ravel(), minlength=atoms.size)
    total = mass.sum()
    cdf_le = np.cumsum(mass) / total
    cdf_lt = cdf_le - mass / total
    phi = normal_cdf(atoms)
    return float(max(np.max(np.abs(cdf_le - phi)), np.max(np.abs(cdf_lt - phi))))


def exact_kolmogorov_to_normal(F: Functional) -> float:
    return kolmogorov_from_atoms(F.values, F.space.probabilities())
