"""Independent reference implementations used only by the tests.

These deliberately avoid the code paths they check: the Bessel oracle is a
plain ascending series in 50-digit mpmath arithmetic (no Hankel branch, no
compensated float tricks), the Gamma oracle is a shifted Stirling series with
30 Bernoulli terms (no call into math.gamma), and the dense linear-algebra
oracles go through generic LU/eigen routines rather than Levinson recursions.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np


def bessel_j_series(nu: float, lam: float, dps: int = 50, min_terms: int = 40) -> float:
    """J_nu(lam) by the ascending series with extended-precision arithmetic."""
    with mp.workdps(dps):
        x = mp.mpf(lam)
        if x == 0:
            if nu > 0:
                return 0.0
            if nu == 0:
                return 1.0
            return float(mp.inf)
        q = x * x / 4
        term = mp.mpf(1)
        total = mp.mpf(1)
        m = 0
        while True:
            m += 1
            term = term * (-q) / (m * (m + mp.mpf(nu)))
            total += term
            if m >= min_terms and abs(term) < abs(total) * mp.mpf(10) ** (-(dps - 5)):
                break
            if m > 2000:
                raise RuntimeError("series oracle did not converge")
        value = (x / 2) ** mp.mpf(nu) / mp.gamma(mp.mpf(nu) + 1) * total
        return float(value)


def bessel_j_prime_fd(nu: float, lam: float, h: float = 1e-5) -> float:
    """Central finite difference of the series oracle."""
    return (bessel_j_series(nu, lam + h) - bessel_j_series(nu, lam - h)) / (2.0 * h)


def bessel_zero_bisect(nu: float, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Bisection for a zero of J_nu on [lo, hi] using the series oracle."""
    f_lo = bessel_j_series(nu, lo)
    f_hi = bessel_j_series(nu, hi)
    if f_lo * f_hi > 0:
        raise ValueError("oracle bracket does not change sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j_series(nu, mid)
        if f_lo * f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stirling_gamma(x: float, shift: int = 30, terms: int = 30, dps: int = 60) -> float:
    """Gamma(x) via the Stirling asymptotic series after shifting the argument
    up by ``shift``; uses exact Bernoulli numbers."""
    with mp.workdps(dps):
        z = mp.mpf(x) + shift
        lng = (z - mp.mpf(1) / 2) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
        for j in range(1, terms + 1):
            lng += mp.bernoulli(2 * j) / (2 * j * (2 * j - 1) * z ** (2 * j - 1))
        value = mp.e**lng
        for i in range(shift):
            value /= mp.mpf(x) + i
        return float(value)


def dense_lu_solve(first_row: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Generic LU solve of the dense symmetric Toeplitz system."""
    from scipy.linalg import lu_factor, lu_solve, toeplitz

    return lu_solve(lu_factor(toeplitz(first_row)), b)


def fgn_spectral_cosine_sum(H: float, lam: float, lags: int = 10**6) -> float:
    """f_H(lam) as the truncated cosine sum gamma(0) + 2 sum_k gamma(k) cos(k lam)."""
    k = np.arange(1, lags + 1, dtype=float)
    two_h = 2.0 * H
    gamma = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + (k - 1.0) ** two_h)
    return 1.0 + 2.0 * float(gamma @ np.cos(k * lam))
