"""Independent reference values for the norm functionals.

Everything here is derived without the library's kernel machinery: window
maps come from solving the defining window equations by hand for the two
closed-form families, inner integrals are explicit antiderivatives, and outer
integrals are dense composite Simpson sums on numpy grids.
"""

import math

import numpy as np
from scipy.integrate import simpson

SQRT5 = math.sqrt(5.0)

# v0 = 1, v1 = x, p = 2: window (alpha t, beta t), grid ratio rho = 1/alpha
ALPHA_X = (5.0 - SQRT5) / 4.0
BETA_X = (5.0 + SQRT5) / 4.0
RHO_X = (5.0 + SQRT5) / 5.0

# v0 = 1/x, v1 = 1, p = 2: window ((1 - 1/sqrt5) t, (1 + 1/sqrt5) t)
ALPHA_RECIP = 1.0 - 1.0 / SQRT5
BETA_RECIP = 1.0 + 1.0 / SQRT5

# unit weights: strong norm of chi_[1,2] with half-unit windows,
# overlap integral 1/24 + 1/8 + 1/24 = 5/24
UNIT_STRONG_CHI = math.sqrt(5.0 / 24.0)

# Sobolev norms of the hat min(x, 2-x)_+
SOBOLEV_HAT_UNIT = math.sqrt(2.0 / 3.0) + math.sqrt(2.0)
SOBOLEV_HAT_X = math.sqrt(2.0 / 3.0) + math.sqrt(8.0 / 3.0)


def _chi_window(ts, lo=1.0, hi=2.0):
    """Intersection of the moving window [t, rho t] with [lo, hi]."""
    wlo = np.maximum(ts, lo)
    whi = np.minimum(RHO_X * ts, hi)
    return wlo, whi, whi > wlo


def brute_strong_chi_x(lo=1.0, hi=2.0, n=200001) -> float:
    """Strong norm of chi_[lo,hi] for v0=1, v1=x, p=2 by dense Simpson."""
    ts = np.linspace(ALPHA_X * lo, hi, n)
    wlo, whi, hit = _chi_window(ts, lo, hi)
    inner = np.where(hit, whi - wlo, 0.0)
    return math.sqrt(simpson(ts ** -2.0 * inner ** 2, x=ts))


def brute_weak_chi_x(lo=1.0, hi=2.0, n=200001) -> tuple[float, float]:
    """(kernel, mass) components of the weak norm of chi_[lo,hi], v0=1, v1=x, p=2.

    V1(x) = 2/(sqrt5 x) so chi/V1 has antiderivative sqrt5 x^2/4; the kernel
    ∫_{a(x)}^t y^{-2} dy = 1/(alpha x) - 1/t integrates in closed form too.
    """
    ts = np.linspace(ALPHA_X * lo, hi, n)
    wlo, whi, hit = _chi_window(ts, lo, hi)
    phi = np.where(hit, SQRT5 / 4.0 * (whi ** 2 - wlo ** 2), 0.0)
    v1t = 2.0 / (SQRT5 * ts)
    gcal2 = simpson(ts ** -2.0 * v1t ** 2 * phi ** 2, x=ts)
    inner = np.where(
        hit, SQRT5 / 2.0 * ((whi - wlo) / ALPHA_X - (whi ** 2 - wlo ** 2) / (2.0 * ts)),
        0.0)
    gfrak2 = simpson(ts ** -2.0 * inner ** 2, x=ts)
    return math.sqrt(gfrak2), math.sqrt(gcal2)


def brute_remark_first_term_chi(lo=1.0, hi=2.0, n=200001) -> float:
    """First unit-weight dual-norm term for chi_[lo,hi], p=2, by dense Simpson."""
    ts = np.linspace(max(lo - 0.5, 0.0), hi, n)
    overlap = np.maximum(np.minimum(ts + 0.5, hi) - np.maximum(ts, lo), 0.0)
    return math.sqrt(simpson(overlap ** 2, x=ts))


def harmonic_number(k: int) -> float:
    return float(sum(1.0 / j for j in range(1, k + 1)))
