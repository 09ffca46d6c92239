"""Fractional Gaussian noise and fractional Brownian motion.

Covariances are unit-variance (gamma(0) = 1); simulation is exact via
circulant embedding (Davies & Harte 1987, in the form given by Dieker 2004)
with a dense-Cholesky fallback, so every distributional identity downstream
holds without discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "FgnModel",
    "FbmKernel",
    "fgn_autocov",
    "fbm_cov",
    "fgn_spectral_density",
    "simulate_fgn",
    "fbm_from_fgn",
    "seed_sequence",
    "derived_rng",
]

#: circulant embedding falls back to Cholesky below this eigenvalue
EMBEDDING_EIG_FLOOR = -1e-9

#: spectral density refuses arguments below this (no extrapolation into the
#: lambda -> 0 singularity; the eigenvalue bounds only need lambda >= 1/n)
SPECTRAL_LAMBDA_MIN = 1e-8


def _check_hurst(H: float) -> float:
    H = float(H)
    if not (0.0 < H < 1.0):
        raise ValueError(f"Hurst index must lie in (0, 1), got {H}")
    return H


def fgn_autocov(H: float, k) -> float | np.ndarray:
    """Autocovariance gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.

    Even in k; gamma(0) = 1.  At H = 1/2 this is the Kronecker delta (white
    noise); for H < 1/2 the lag-one value is negative.
    """
    H = _check_hurst(H)
    k_arr = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * H
    out = 0.5 * (np.abs(k_arr + 1.0) ** two_h - 2.0 * k_arr**two_h + np.abs(k_arr - 1.0) ** two_h)
    return float(out) if np.ndim(k) == 0 else out


def fbm_cov(H: float, s, t) -> float | np.ndarray:
    """fBM covariance K(s,t) = (|s|^{2H} + |t|^{2H} - |t-s|^{2H}) / 2.

    Reduces to min(s, t) at H = 1/2.  Arguments must be nonnegative.
    """
    H = _check_hurst(H)
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(s_arr < 0.0) or np.any(t_arr < 0.0):
        raise ValueError("fbm_cov requires s, t >= 0")
    two_h = 2.0 * H
    out = 0.5 * (s_arr**two_h + t_arr**two_h - np.abs(t_arr - s_arr) ** two_h)
    if np.ndim(s) == 0 and np.ndim(t) == 0:
        return float(out)
    return out


def fgn_spectral_density(H: float, lam, terms: int = 200) -> float | np.ndarray:
    """Spectral density f_H of unit-variance fGN on (0, pi].

    Uses Sinai's closed form

        f_H(lambda) = 2 sin(pi H) Gamma(2H+1) (1 - cos lambda)
                      * sum_{j in Z} |lambda + 2 pi j|^{-1-2H},

    normalized so that gamma(k) = (1/2pi) int_{-pi}^{pi} f_H(l) e^{ikl} dl,
    i.e. (1/pi) int_0^pi f_H = gamma(0) = 1 and f_H ~ c_H lambda^{1-2H} as
    lambda -> 0.  The lattice sum keeps |j| <= terms explicitly and replaces
    both tails by midpoint-corrected integrals, accurate to ~(2 pi J)^{-3-2H}.

    Arguments below 1e-8 are refused rather than extrapolated.
    """
    H = _check_hurst(H)
    lam_arr = np.asarray(lam, dtype=float)
    scalar = lam_arr.ndim == 0
    lam_arr = np.atleast_1d(lam_arr)
    if np.any(lam_arr > math.pi) or np.any(lam_arr < SPECTRAL_LAMBDA_MIN):
        raise ValueError(f"spectral density domain is [{SPECTRAL_LAMBDA_MIN:g}, pi]")

    p = 1.0 + 2.0 * H
    j = np.arange(-terms, terms + 1, dtype=float)
    lattice = np.abs(lam_arr[:, None] + 2.0 * math.pi * j[None, :]) ** (-p)
    core = lattice.sum(axis=1)
    # Euler-Maclaurin tails from j = terms + 1/2 outward, both signs of j:
    # sum_{j > J} h(j) ~ int_{J+1/2} h + h'(J+1/2)/24
    edge = 2.0 * math.pi * (terms + 0.5)
    tail = ((edge + lam_arr) ** (1.0 - p) + (edge - lam_arr) ** (1.0 - p)) / (
        2.0 * math.pi * (p - 1.0)
    )
    tail -= (
        p
        * 2.0
        * math.pi
        / 24.0
        * ((edge + lam_arr) ** (-p - 1.0) + (edge - lam_arr) ** (-p - 1.0))
    )
    c_h = math.sin(math.pi * H) * math.gamma(2.0 * H + 1.0)
    # 2 sin^2(l/2) = 1 - cos(l) without cancellation near l = 0
    out = 4.0 * c_h * np.sin(0.5 * lam_arr) ** 2 * (core + tail)
    return float(out[0]) if scalar else out


def seed_sequence(seed, *key: int) -> np.random.SeedSequence:
    """Deterministic seed splitting: (seed, key) -> independent SeedSequence.

    Replicate r of a Monte Carlo run uses ``seed_sequence(seed, r)`` (or a
    longer key), so the stream assignment is a pure function of indices and
    never depends on worker count or execution order.
    """
    if isinstance(seed, np.random.SeedSequence):
        if key:
            return np.random.SeedSequence(
                entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key)
            )
        return seed
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(key))


def derived_rng(seed, *key: int) -> np.random.Generator:
    """Generator seeded by :func:`seed_sequence`."""
    return np.random.default_rng(seed_sequence(seed, *key))


def _embedding_eigenvalues(H: float, n: int) -> np.ndarray:
    gamma = fgn_autocov(H, np.arange(n))
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # length 2(n-1)
    return np.fft.fft(row).real


def simulate_fgn(H: float, n: int, seed) -> np.ndarray:
    """Exact draw of n consecutive values of unit-variance fGN.

    Circulant embedding of size 2(n-1): the eigenvalues of the even periodic
    extension of gamma are computed by FFT and the draw is assembled in the
    frequency domain, giving the exact Toeplitz law.  If any eigenvalue
    falls below -1e-9 (small n with H near 1), the draw falls back to a dense
    Cholesky factor; the chosen path depends only on (H, n), so output is a
    deterministic function of the seed either way.

    ``seed`` may be an int, a SeedSequence, or a Generator.
    """
    H = _check_hurst(H)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed_sequence(seed))
    if n == 1:
        return rng.standard_normal(1)

    eigs = _embedding_eigenvalues(H, n)
    if eigs.min() < EMBEDDING_EIG_FLOOR:
        return _simulate_fgn_cholesky(H, n, rng)

    m = 2 * (n - 1)
    eigs = np.clip(eigs, 0.0, None)
    xi = np.zeros(m, dtype=complex)
    xi[0] = rng.standard_normal()
    xi[n - 1] = rng.standard_normal()
    if n > 2:
        u = rng.standard_normal(n - 2)
        v = rng.standard_normal(n - 2)
        xi[1 : n - 1] = (u + 1j * v) / math.sqrt(2.0)
        xi[n:] = np.conj(xi[1 : n - 1][::-1])
    x = np.fft.ifft(np.sqrt(eigs) * xi) * math.sqrt(m)
    return x.real[:n].copy()


def _simulate_fgn_cholesky(H: float, n: int, rng: np.random.Generator) -> np.ndarray:
    from scipy.linalg import toeplitz

    gamma = fgn_autocov(H, np.arange(n))
    try:
        chol = np.linalg.cholesky(toeplitz(gamma))
    except np.linalg.LinAlgError as exc:  # gamma misimplementation, not data
        raise NumericalError(
            f"both circulant embedding and Cholesky failed for H={H}, n={n}"
        ) from exc
    return chol @ rng.standard_normal(n)


def fbm_from_fgn(fgn) -> np.ndarray:
    """Partial sums S_k = sum_{j<=k} x_j; exact fGN in gives fBM at integer
    times out."""
    x = np.asarray(fgn, dtype=float)
    if x.size == 0:
        raise ValueError("fbm_from_fgn requires a nonempty input")
    return np.cumsum(x)


@dataclass(frozen=True)
class FgnModel:
    """Fractional Gaussian noise of length n: H, n plus validity checks.

    Construction verifies gamma(0) = 1 and positive semidefiniteness along
    both simulation routes (embedding eigenvalues always; dense Cholesky for
    n <= 1024, where it is cheap).
    """

    H: float
    n: int

    def __post_init__(self):
        _check_hurst(self.H)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n >= 2:
            eigs = _embedding_eigenvalues(self.H, self.n)
            if eigs.min() < EMBEDDING_EIG_FLOOR and self.n <= 1024:
                from scipy.linalg import toeplitz

                np.linalg.cholesky(toeplitz(self.autocov_row()))  # raises if not PD

    def autocov_row(self) -> np.ndarray:
        return fgn_autocov(self.H, np.arange(self.n))

    def simulate(self, seed) -> np.ndarray:
        return simulate_fgn(self.H, self.n, seed)


@dataclass(frozen=True)
class FbmKernel:
    """fBM covariance kernel for a fixed Hurst index."""

    H: float

    def __post_init__(self):
        _check_hurst(self.H)

    def cov(self, s, t):
        return fbm_cov(self.H, s, t)

    def matrix(self, grid) -> np.ndarray:
        g = np.asarray(grid, dtype=float)
        return fbm_cov(self.H, g[:, None], g[None, :])
